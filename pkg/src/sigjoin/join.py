"""Equi-join operators: nested-loop oracle, baseline and signature hash joins,
and grace-partitioned variants of both.

Hash tables are chained; a bucket is chosen by ``bucket_of`` applied to the
key digest. The baseline's digest is the key string itself, the signature
join's digest is the algebraic signature plus the key's byte length.
"""

from __future__ import annotations

import gc
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import MissingKeyColumn, SpecMismatch
from .relation import Relation
from .signature import AlgebraicSignature, SignatureBase, make_base

NESTED_LOOP = "nested_loop"
HASH_BASELINE = "hash_baseline"
HASH_SIGNATURE = "hash_signature"
GRACE_BASELINE = "grace_baseline"
GRACE_SIGNATURE = "grace_signature"
ALGORITHMS = (NESTED_LOOP, HASH_BASELINE, HASH_SIGNATURE, GRACE_BASELINE, GRACE_SIGNATURE)
SIGNATURE_ALGORITHMS = (HASH_SIGNATURE, GRACE_SIGNATURE)

VERIFY = "verify"
TRUST = "trust"

# FNV-1a offset basis for buckets; the byte-swapped basis for partitions so
# the two routings are independent.
BUCKET_SEED = 0xCBF29CE484222325
PARTITION_SEED = 0x84222325CBF29CE4


@dataclass(frozen=True)
class JoinSpec:
    left_key: str = "key"
    right_key: str = "key"
    algorithm: str = HASH_SIGNATURE
    mode: str | None = None
    partitions: int = 8
    sig_config: tuple[int, int] = (16, 2)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.partitions < 1:
            raise ValueError("partitions must be >= 1")
        if self.is_signature:
            if self.mode is None:
                object.__setattr__(self, "mode", VERIFY)
            if self.mode not in (VERIFY, TRUST):
                raise ValueError(f"mode must be 'verify' or 'trust', got {self.mode!r}")
        elif self.mode is not None:
            raise ValueError(f"mode applies only to signature algorithms, not {self.algorithm}")
        f, n_sig = self.sig_config
        make_base(f, n_sig)  # validates the configuration

    @property
    def is_signature(self) -> bool:
        return self.algorithm in SIGNATURE_ALGORITHMS

    @property
    def is_grace(self) -> bool:
        return self.algorithm in (GRACE_BASELINE, GRACE_SIGNATURE)

    @property
    def base(self) -> SignatureBase:
        return make_base(*self.sig_config)


@dataclass
class JoinStats:
    build_ns: int = 0
    probe_ns: int = 0
    partition_ns: int = 0
    peak_table_bytes: int = 0
    probes: int = 0
    comparisons: int = 0
    signature_matches: int = 0
    verified_matches: int | None = None
    collisions: int | None = None

    @property
    def total_ns(self) -> int:
        return self.build_ns + self.probe_ns + self.partition_ns


@dataclass
class JoinResult:
    """Matching (R row, S row) index pairs plus execution statistics."""

    r_idx: np.ndarray
    s_idx: np.ndarray
    stats: JoinStats = field(default_factory=JoinStats)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.r_idx.tolist(), self.s_idx.tolist()))

    def pair_set(self) -> set[tuple[int, int]]:
        return set(self.pairs)

    def __len__(self):
        return len(self.r_idx)


@contextmanager
def _no_gc():
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def _keys(rel: Relation, column: str) -> list[bytes]:
    if column not in rel.schema.names:
        raise MissingKeyColumn(column)
    return rel.key_bytes(column)


# -- hashing -----------------------------------------------------------------

def digest_bytes(digest) -> bytes:
    if isinstance(digest, AlgebraicSignature):
        return digest.digest_bytes()
    return bytes(digest)


def bucket_of(digest, nbuckets: int) -> int:
    """Bucket index of a key digest (key bytes or an AlgebraicSignature)."""
    k = _backend.kernels
    return k.index_of(k.digest_hash(digest_bytes(digest), BUCKET_SEED), nbuckets)


def partition_of(digest, partitions: int) -> int:
    k = _backend.kernels
    return k.index_of(k.digest_hash(digest_bytes(digest), PARTITION_SEED), partitions)


def bucket_count(rows: int) -> int:
    """Next power of two >= 2 * rows (at least 1)."""
    n = 1
    while n < 2 * rows:
        n <<= 1
    return n


# -- nested loop -------------------------------------------------------------

def nested_loop_join(r: Relation, s: Relation, left_key: str = "key",
                     right_key: str | None = None) -> JoinResult:
    """All (i, j) with byte-equal keys, in (i, j) order. Correctness oracle."""
    rk = _keys(r, left_key)
    sk = _keys(s, right_key or left_key)
    r_out, s_out = [], []
    t0 = time.perf_counter_ns()
    for i, a in enumerate(rk):
        for j, b in enumerate(sk):
            if a == b:
                r_out.append(i)
                s_out.append(j)
    stats = JoinStats(probe_ns=time.perf_counter_ns() - t0, probes=len(rk) * len(sk),
                      comparisons=len(rk) * len(sk))
    return JoinResult(np.array(r_out, dtype=np.int64), np.array(s_out, dtype=np.int64), stats)


# -- simple hash join --------------------------------------------------------

class BuildTable:
    """Build-side hash table; immutable once built.

    Entries are tuple indices into the build relation; ``digest(i)`` gives
    the stored key digest of entry ``i``.
    """

    def __init__(self, kernel_table, keys, spec: JoinSpec, signature: bool, build_ns: int):
        self._table = kernel_table
        self._keys = keys
        self.spec = spec
        self.signature = signature
        self.sig_config = spec.sig_config if signature else None
        self.build_ns = build_ns
        self.nbuckets = kernel_table.nbuckets
        if signature:
            self.peak_table_bytes = len(keys) * spec.base.digest_size
        else:
            self.peak_table_bytes = sum(len(k) for k in keys)

    def __len__(self):
        return len(self._keys)

    @property
    def buckets(self) -> list[list[tuple[object, int]]]:
        """Per bucket, the list of (key_digest, tuple_index) entries."""
        return [[(self.digest(i), i) for i in chain] for chain in self._table.buckets()]

    def digest(self, i: int):
        if self.signature:
            syms, byte_len = self._table.digest(i)
            base = self.spec.base
            return AlgebraicSignature(tuple(syms), byte_len, base.f, base.tag)
        return self._keys[i]


def _build_keys(keys: list[bytes], spec: JoinSpec, signature: bool, nbuckets: int | None = None) -> BuildTable:
    k = _backend.kernels
    nbuckets = nbuckets or bucket_count(len(keys))
    with _no_gc():
        t0 = time.perf_counter_ns()
        if signature:
            base = spec.base
            table = k.SigTable(keys, base.ctx, base.n_sig, nbuckets, BUCKET_SEED)
        else:
            table = k.KeyTable(keys, nbuckets, BUCKET_SEED)
        elapsed = time.perf_counter_ns() - t0
    return BuildTable(table, keys, spec, signature, elapsed)


def build(r: Relation, spec: JoinSpec, key: str | None = None) -> BuildTable:
    """Hash the build relation's key column into a fresh table."""
    if spec.algorithm == NESTED_LOOP:
        raise ValueError("nested_loop has no build phase")
    return _build_keys(_keys(r, key or spec.left_key), spec, spec.is_signature)


def _probe_keys(table: BuildTable, keys: list[bytes], spec: JoinSpec) -> JoinResult:
    if table.signature != spec.is_signature or table.sig_config != (spec.sig_config if spec.is_signature else None):
        raise SpecMismatch(
            f"table built for {table.sig_config or 'baseline'}, probed with "
            f"{spec.sig_config if spec.is_signature else 'baseline'}")
    stats = JoinStats(build_ns=table.build_ns, peak_table_bytes=table.peak_table_bytes, probes=len(keys))
    with _no_gc():
        t0 = time.perf_counter_ns()
        if table.signature:
            r_idx, s_idx, sig_matches, comparisons = table._table.probe(keys, spec.mode == VERIFY)
        else:
            r_idx, s_idx, comparisons = table._table.probe(keys)
        stats.probe_ns = time.perf_counter_ns() - t0
    stats.comparisons = int(comparisons)
    if table.signature:
        stats.signature_matches = int(sig_matches)
        if spec.mode == VERIFY:
            stats.verified_matches = len(r_idx)
            stats.collisions = stats.signature_matches - stats.verified_matches
    else:
        stats.verified_matches = len(r_idx)
    return JoinResult(r_idx, s_idx, stats)


def probe(table: BuildTable, s: Relation, spec: JoinSpec, key: str | None = None) -> JoinResult:
    """Probe ``table`` with every row of ``s``; pairs come out in S order."""
    return _probe_keys(table, _keys(s, key or spec.right_key), spec)


def hash_join(r: Relation, s: Relation, spec: JoinSpec) -> JoinResult:
    """Simple hash join, building on the smaller input."""
    rk = _keys(r, spec.left_key)
    sk = _keys(s, spec.right_key)
    return _hash_join_keys(rk, sk, spec)


def _hash_join_keys(rk, sk, spec):
    swapped = len(rk) > len(sk)
    if swapped:
        rk, sk = sk, rk
    table = _build_keys(rk, spec, spec.is_signature)
    res = _probe_keys(table, sk, spec)
    if swapped:
        res.r_idx, res.s_idx = res.s_idx, res.r_idx
    return res


# -- grace hash join ---------------------------------------------------------

def _route(keys: list[bytes], partitions: int, spec: JoinSpec) -> np.ndarray:
    k = _backend.kernels
    if partitions == 1:
        return np.zeros(len(keys), dtype=np.int64)
    if spec.is_signature:
        base = spec.base
        return k.route_sigs(keys, base.ctx, base.n_sig, PARTITION_SEED, partitions)
    return k.route_keys(keys, PARTITION_SEED, partitions)


def _split(routes: np.ndarray, partitions: int) -> list[np.ndarray]:
    order = np.argsort(routes, kind="stable")
    cuts = np.searchsorted(routes[order], np.arange(1, partitions))
    return np.split(order, cuts)


def grace_partition(rel: Relation, key: str, partitions: int, spec: JoinSpec) -> list[list[int]]:
    """Row indices of ``rel`` per partition.

    Rows are routed by ``partition_of`` their key digest, so equal keys
    always land in the same partition. Within a partition rows keep their
    input order.
    """
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    routes = _route(_keys(rel, key), partitions, spec)
    return [p.tolist() for p in _split(routes, partitions)]


def grace_join(r: Relation, s: Relation, spec: JoinSpec) -> JoinResult:
    """Partition both inputs, then hash-join each partition pair."""
    rk = _keys(r, spec.left_key)
    sk = _keys(s, spec.right_key)
    parts = spec.partitions
    t0 = time.perf_counter_ns()
    r_parts = _split(_route(rk, parts, spec), parts)
    s_parts = _split(_route(sk, parts, spec), parts)
    partition_ns = time.perf_counter_ns() - t0

    total = JoinStats(partition_ns=partition_ns)
    if spec.is_signature and spec.mode == VERIFY:
        total.collisions = 0
    total.verified_matches = 0 if (not spec.is_signature or spec.mode == VERIFY) else None
    r_chunks, s_chunks = [], []
    for rp, sp in zip(r_parts, s_parts):
        if len(rp) == 0 or len(sp) == 0:
            continue
        res = _hash_join_keys([rk[i] for i in rp], [sk[i] for i in sp], spec)
        r_chunks.append(rp[res.r_idx])
        s_chunks.append(sp[res.s_idx])
        st = res.stats
        total.build_ns += st.build_ns
        total.probe_ns += st.probe_ns
        total.peak_table_bytes = max(total.peak_table_bytes, st.peak_table_bytes)
        total.probes += st.probes
        total.comparisons += st.comparisons
        total.signature_matches += st.signature_matches
        if total.verified_matches is not None:
            total.verified_matches += st.verified_matches
        if total.collisions is not None:
            total.collisions += st.collisions
    empty = np.zeros(0, dtype=np.int64)
    r_idx = np.concatenate(r_chunks) if r_chunks else empty
    s_idx = np.concatenate(s_chunks) if s_chunks else empty
    return JoinResult(r_idx, s_idx, total)


def join(r: Relation, s: Relation, spec: JoinSpec) -> JoinResult:
    """Run ``spec.algorithm`` on R and S."""
    if spec.algorithm == NESTED_LOOP:
        return nested_loop_join(r, s, spec.left_key, spec.right_key)
    if spec.is_grace:
        return grace_join(r, s, spec)
    return hash_join(r, s, spec)


def materialize(r: Relation, s: Relation, result: JoinResult) -> list[tuple]:
    """Concatenated (R row + S row) tuples for every result pair."""
    return [r.rows[i] + s.rows[j] for i, j in result.pairs]
