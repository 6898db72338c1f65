"""Typed in-memory relations, CSV I/O and the synthetic join-data generator."""

from __future__ import annotations

import csv
import datetime as dt
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (DuplicateHeader, MissingColumn, MissingKeyColumn,
                     SchemaError, TypeParseError)

TYPES = ("integer", "character", "string", "date")

#: Alphabet for generated keys and filler: the 94 visible ASCII characters.
PRINTABLE = bytes(range(0x21, 0x7F))


@dataclass(frozen=True)
class Schema:
    columns: tuple[tuple[str, str], ...]
    key_column: str

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple((str(n), str(t)) for n, t in self.columns))
        names = [n for n, _ in self.columns]
        seen = set()
        for name, typ in self.columns:
            if name in seen:
                raise SchemaError(f"duplicate column {name!r}")
            seen.add(name)
            if typ not in TYPES:
                raise SchemaError(f"column {name!r}: unknown type {typ!r}")
        if self.key_column not in names:
            raise SchemaError(f"key column {self.key_column!r} is not a column")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.columns]

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.columns):
            if n == name:
                return i
        raise MissingColumn(name, "schema")

    def type_of(self, name: str) -> str:
        return self.columns[self.index(name)][1]


class Relation:
    """Rows of a fixed schema; treat as immutable once built."""

    def __init__(self, schema: Schema, rows=()):
        self.schema = schema
        self.rows = [tuple(r) for r in rows]
        self._key_cache: dict[str, list[bytes]] = {}

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.schema == other.schema and self.rows == other.rows

    def __repr__(self):
        return f"Relation({len(self.rows)} rows, key={self.schema.key_column!r})"

    def column(self, name: str) -> list:
        i = self.schema.index(name)
        return [r[i] for r in self.rows]

    def key_bytes(self, name: str | None = None) -> list[bytes]:
        """UTF-8 bytes of a string-typed column (the join key by default)."""
        name = name or self.schema.key_column
        if name not in self._key_cache:
            if name not in self.schema.names or self.schema.type_of(name) not in ("string", "character"):
                raise MissingKeyColumn(name)
            i = self.schema.index(name)
            self._key_cache[name] = [r[i].encode("utf-8") for r in self.rows]
        return self._key_cache[name]

    def take(self, indices) -> Relation:
        return Relation(self.schema, [self.rows[i] for i in indices])


# -- CSV ---------------------------------------------------------------------

def _parse(value: str, typ: str):
    if typ == "string":
        return value
    if typ == "integer":
        return int(value)
    if typ == "character":
        if len(value) != 1:
            raise ValueError("expected exactly one character")
        return value
    return dt.date.fromisoformat(value)


def _format(value, typ: str) -> str:
    if typ == "date":
        return value.isoformat()
    return str(value)


def load_csv(path, schema: Schema) -> Relation:
    """Read a headered CSV file into a relation.

    Header columns may appear in any order but must be exactly the schema's
    columns. Strings are kept verbatim.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MissingColumn(schema.names[0])
        seen = set()
        for name in header:
            if name in seen:
                raise DuplicateHeader(name)
            seen.add(name)
        for name in schema.names:
            if name not in seen:
                raise MissingColumn(name)
        extra = [n for n in header if n not in schema.names]
        if extra:
            raise SchemaError(f"unexpected column {extra[0]!r} in header")
        order = [header.index(n) for n in schema.names]
        types = [t for _, t in schema.columns]
        rows = []
        for raw in reader:
            line = reader.line_num
            if len(raw) != len(header):
                raise SchemaError(f"row {line}: expected {len(header)} fields, got {len(raw)}")
            row = []
            for col, typ, src in zip(schema.names, types, order):
                try:
                    row.append(_parse(raw[src], typ))
                except ValueError:
                    raise TypeParseError(line, col, raw[src], typ) from None
            rows.append(tuple(row))
    return Relation(schema, rows)


def emit_csv(relation: Relation, path) -> None:
    types = [t for _, t in relation.schema.columns]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(relation.schema.names)
        for row in relation.rows:
            w.writerow([_format(v, t) for v, t in zip(row, types)])


# -- schema sidecar ----------------------------------------------------------

def write_schema(schema: Schema, path) -> None:
    cols = ",".join(f"{n}:{t}" for n, t in schema.columns)
    Path(path).write_text(f"columns={cols}\nkey={schema.key_column}\n", encoding="utf-8")


def read_schema(path) -> Schema:
    """Parse a ``key=value`` schema sidecar (``columns=`` and ``key=`` lines)."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        values[k.strip()] = v.strip()
    if "columns" not in values or "key" not in values:
        raise SchemaError(f"{path}: needs both 'columns' and 'key' entries")
    cols = []
    for item in values["columns"].split(","):
        name, sep, typ = item.partition(":")
        if not sep:
            raise SchemaError(f"{path}: column entry {item!r} lacks ':type'")
        cols.append((name.strip(), typ.strip()))
    return Schema(tuple(cols), values["key"])


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".schema")


# -- generator ---------------------------------------------------------------

def default_selectivity(card_r: int, card_s: int) -> float:
    """Default join selectivity, 1.5 / max(|R|, |S|)."""
    return 1.5 / max(card_r, card_s)


@dataclass(frozen=True)
class GenSpec:
    card_r: int = 10_000
    card_s: int = 20_000
    attr_len: int = 100
    selectivity: float | None = None
    row_bytes: int = 128
    seed: int = 0

    def __post_init__(self):
        if self.card_r < 1:
            raise ValueError("card_r must be >= 1 (empty build side)")
        if self.card_r > self.card_s:
            raise ValueError("card_r must not exceed card_s")
        if self.attr_len < 1:
            raise ValueError("attr_len must be >= 1")
        if self.selectivity is None:
            object.__setattr__(self, "selectivity", default_selectivity(self.card_r, self.card_s))
        if not 0 <= self.selectivity <= 1:
            raise ValueError("selectivity must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def expected_matches(self) -> float:
        return self.selectivity * self.card_r * self.card_s


GEN_SCHEMA_COLUMNS = (("id", "integer"), ("key", "string"), ("grade", "character"),
                      ("created", "date"), ("pad", "string"))


@dataclass
class GeneratedPair:
    r: Relation
    s: Relation
    spec: GenSpec
    match_count: int
    planted_rows: int = 0
    notes: list[str] = field(default_factory=list)


def _random_keys(rng, count, length):
    idx = rng.integers(0, len(PRINTABLE), size=(count, length), dtype=np.uint8)
    table = np.frombuffer(PRINTABLE, dtype=np.uint8)
    buf = table[idx].tobytes()
    return [buf[i * length:(i + 1) * length] for i in range(count)]


def _distinct_keys(rng, count, length, avoid=frozenset()):
    """``count`` keys not in ``avoid`` and distinct where the domain allows."""
    domain = len(PRINTABLE) ** length if length < 12 else math.inf
    if domain - len(avoid) < 2 * count:
        # Too small a key space for rejection sampling; take uniform draws and
        # steer away from ``avoid`` only when possible.
        free = [] if domain > 10**6 else [k for k in _all_keys(length) if k not in avoid]
        if free:
            pick = rng.integers(0, len(free), size=count)
            return [free[i] for i in pick]
        return _random_keys(rng, count, length)
    out = []
    seen = set(avoid)
    while len(out) < count:
        for k in _random_keys(rng, count - len(out), length):
            if k not in seen:
                seen.add(k)
                out.append(k)
    return out


def _all_keys(length):
    if length == 1:
        return [bytes([c]) for c in PRINTABLE]
    return [bytes([a]) + rest for a in PRINTABLE for rest in _all_keys(length - 1)]


def generate_pair(spec: GenSpec) -> GeneratedPair:
    """Random relations R, S whose join on ``key`` has about
    ``selectivity * |R| * |S|`` result rows.

    R holds groups of ``g`` identical keys; each S row copies a random R
    row's key with probability chosen so the expected match count hits the
    target, and otherwise gets a key absent from R. ``match_count`` is the
    exact join cardinality of the produced data.
    """
    rng = np.random.default_rng(spec.seed)
    m, n, length = spec.card_r, spec.card_s, spec.attr_len
    per_probe = spec.selectivity * m  # expected matches per S row
    group = max(1, math.ceil(per_probe))
    p_plant = per_probe / group

    groups = _distinct_keys(rng, math.ceil(m / group), length)
    r_keys = [groups[i // group] for i in range(m)]
    r_keys = [r_keys[i] for i in rng.permutation(m)]

    r_set = frozenset(r_keys)
    plant = rng.random(n) < p_plant
    src = rng.integers(0, m, size=n)
    fresh = iter(_distinct_keys(rng, int(n - plant.sum()), length, avoid=r_set))
    s_keys = [r_keys[src[i]] if plant[i] else next(fresh) for i in range(n)]

    counts = Counter(r_keys)
    match_count = sum(counts.get(k, 0) for k in s_keys)

    schema = Schema(GEN_SCHEMA_COLUMNS, "key")
    r = Relation(schema, _rows(rng, r_keys, spec.row_bytes))
    s = Relation(schema, _rows(rng, s_keys, spec.row_bytes))
    return GeneratedPair(r, s, spec, match_count, int(plant.sum()))


_EPOCH = dt.date(1990, 1, 1).toordinal()


def _rows(rng, keys, row_bytes):
    count = len(keys)
    length = len(keys[0]) if keys else 0
    # id (~8) + key + grade (1) + date (10) + separators make up the rest
    pad_len = max(0, row_bytes - length - 23)
    grades = rng.integers(ord("A"), ord("F") + 1, size=count)
    days = rng.integers(0, 20 * 365, size=count)
    pads = _random_keys(rng, count, pad_len) if pad_len else [b""] * count
    return [
        (i + 1, k.decode("ascii"), chr(grades[i]),
         dt.date.fromordinal(_EPOCH + int(days[i])), pads[i].decode("ascii"))
        for i, k in enumerate(keys)
    ]


def default_seed() -> int:
    """Seed from ``SIGJOIN_SEED`` if set, else 0."""
    raw = os.environ.get("SIGJOIN_SEED", "").strip()
    return int(raw, 0) if raw else 0
