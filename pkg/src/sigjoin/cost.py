"""Analytic cost of a signature-based hash join.

``evaluate`` returns every term separately. The total simply adds them,
even though memory (pages), I/O counts and weighted tuple costs are
different units; weight the breakdown yourself if you need a single time.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError

UNIT_COSTS = (
    "disk_input_r", "hash_bucket", "disk_output_buckets",
    "read_bucket", "signature_generating", "build_sign_cost", "write_hsign_to_disk",
    "disk_input_s", "signature_calculation", "probe_sign_cost",
    "disk_input_tuples_result", "materialize_t",
)

COMPONENTS = ("memory_needed_pages", "disk_ios", "build_buckets", "build_hash",
              "probe_hash", "output_result", "total")


@dataclass(frozen=True)
class CostParams:
    """Sizes plus per-tuple (or per-event) unit costs.

    ``write_hsign_to_disk``, ``disk_input_tuples_result`` and
    ``materialize_t`` are charged once per join; the other unit costs once
    per tuple.
    """

    b: int = 1
    k: int = 1
    r_area: int = 0
    m: int = 0
    n: int = 0
    L_f: float = 1
    disk_input_r: float = 0.0
    hash_bucket: float = 0.0
    disk_output_buckets: float = 0.0
    read_bucket: float = 0.0
    signature_generating: float = 0.0
    build_sign_cost: float = 0.0
    write_hsign_to_disk: float = 0.0
    disk_input_s: float = 0.0
    signature_calculation: float = 0.0
    probe_sign_cost: float = 0.0
    disk_input_tuples_result: float = 0.0
    materialize_t: float = 0.0

    def __post_init__(self):
        if self.b < 1 or self.k < 1:
            raise ValueError("b and k must be >= 1")
        if not 0 <= self.r_area <= self.b:
            raise ValueError("r_area must lie in [0, b]")
        if self.m < 0 or self.n < 0:
            raise ValueError("m and n must be non-negative")
        if self.L_f < 1:
            raise ValueError("L_f must be >= 1")
        for name in UNIT_COSTS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def units(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in UNIT_COSTS}

    def with_units(self, units: dict[str, float]) -> CostParams:
        return replace(self, **units)


@dataclass(frozen=True)
class CostBreakdown:
    memory_needed_pages: float
    disk_ios: float
    build_buckets: float
    build_hash: float
    probe_hash: float
    output_result: float
    total: float
    grace_temp_ios: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def memory_needed(b: int, k: int) -> int:
    """Pages of memory needed: max(ceil(b / k), k)."""
    if b < 1 or k < 1:
        raise ValueError("b and k must be >= 1")
    return max(-(-b // k), k)


def disk_ios(b: int, r_area: int) -> int:
    """Base reads of both inputs plus temp-file writes and reads: 2b + 4(b - r)."""
    if not 0 <= r_area <= b:
        raise ValueError("r_area must lie in [0, b]")
    return 2 * b + 4 * (b - r_area)


def evaluate(p: CostParams) -> CostBreakdown:
    mem = memory_needed(p.b, p.k)
    ios = disk_ios(p.b, p.r_area)
    build_buckets = (p.m * p.L_f + p.n * p.L_f) * (p.disk_input_r + p.hash_bucket + p.disk_output_buckets)
    build_hash = p.m * (p.read_bucket + p.signature_generating + p.build_sign_cost) + p.write_hsign_to_disk
    probe_hash = p.n * (p.disk_input_s + p.signature_calculation + p.probe_sign_cost)
    output_result = p.disk_input_tuples_result + p.materialize_t
    total = mem + ios + build_buckets + build_hash + probe_hash + output_result
    return CostBreakdown(mem, ios, build_buckets, build_hash, probe_hash, output_result,
                         total, 4 * (p.b - p.r_area))


# -- default profile ---------------------------------------------------------

PAGE_BYTES = 4096
TUPLES_PER_PAGE = 32
SIGN_US_PER_MB = 25_000.0   # 20-30 ms per MB
PAGE_READ_US = 100.0        # nominal sequential 4 KB page transfer


def default_params(m: int = 10_000, n: int = 20_000, attr_len: int = 100, k: int = 64) -> CostParams:
    """Unit costs in microseconds for the 10000 x 20000, 128-byte-row setup.

    Signature costs follow a 25 ms/MB signing rate; I/O terms charge a
    nominal 4 KB page read spread over its 32 tuples.
    """
    b = -(-m // TUPLES_PER_PAGE)
    per_tuple_io = PAGE_READ_US / TUPLES_PER_PAGE
    sign = SIGN_US_PER_MB * attr_len / 1e6
    compare = 0.01
    pages_out = max(1, -(-n // TUPLES_PER_PAGE))
    return CostParams(
        b=b, k=k, r_area=min(b, max(0, k - 1)), m=m, n=n, L_f=1,
        disk_input_r=per_tuple_io, hash_bucket=compare, disk_output_buckets=per_tuple_io,
        read_bucket=per_tuple_io, signature_generating=sign, build_sign_cost=compare,
        write_hsign_to_disk=0.0,
        disk_input_s=per_tuple_io, signature_calculation=sign, probe_sign_cost=compare,
        disk_input_tuples_result=pages_out * PAGE_READ_US, materialize_t=pages_out * PAGE_READ_US,
    )


# -- config I/O --------------------------------------------------------------

_FIELDS = {f.name: f for f in fields(CostParams)}
_ALIASES = {"l_f": "L_f", "lf": "L_f", "r": "r_area"}


def parse_config(text: str, base: CostParams | None = None) -> CostParams:
    """Parse ``name = value`` lines into CostParams.

    Unlisted parameters keep their value from ``base`` (all-zero defaults
    when omitted). ``#`` starts a comment.
    """
    values = asdict(base) if base is not None else {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected name = value, got {raw.strip()!r}", lineno)
        name, value = (part.strip() for part in line.split("=", 1))
        name = _ALIASES.get(name.lower(), name)
        if name not in _FIELDS:
            raise ConfigError(f"unknown parameter {name!r}", lineno)
        try:
            num = float(value)
        except ValueError:
            raise ConfigError(f"{name}: {value!r} is not a number", lineno) from None
        if math.isnan(num) or math.isinf(num):
            raise ConfigError(f"{name}: value must be finite", lineno)
        if name in ("b", "k", "r_area", "m", "n"):
            if num != int(num):
                raise ConfigError(f"{name} must be an integer", lineno)
            num = int(num)
        values[name] = num
    try:
        return CostParams(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, base: CostParams | None = None) -> CostParams:
    return parse_config(Path(path).read_text(encoding="utf-8"), base)


def dump_config(p: CostParams) -> str:
    return "".join(f"{k} = {v}\n" for k, v in asdict(p).items())


def breakdown_rows(bd: CostBreakdown) -> list[tuple[str, float]]:
    d = bd.as_dict()
    return [(c, d[c]) for c in COMPONENTS] + [("grace_temp_ios", d["grace_temp_ios"])]


def format_breakdown(bd: CostBreakdown) -> str:
    labels = {
        "memory_needed_pages": "Memory needed (pages)",
        "disk_ios": "Disk I/Os",
        "build_buckets": "Build buckets",
        "build_hash": "Build hash",
        "probe_hash": "Probe hash",
        "output_result": "Output result",
        "total": "Total",
        "grace_temp_ios": "  of which temp-file I/Os",
    }
    return "\n".join(f"{labels[c]:<26}{v:>16.4f}" for c, v in breakdown_rows(bd))
