"""Pure-Python join kernels.

Same API and bit-exact results as the compiled ``_kernels`` extension; used
when the extension is not built or ``SIGJOIN_PURE_PYTHON`` is set.
"""

import sys
from array import array

import numpy as np

from .errors import StringTooLong

NAME = "python"

MASK64 = (1 << 64) - 1
FNV_PRIME = 0x100000001B3
FIB = 0x9E3779B97F4A7C15
LEN_BYTES = 4

_BIG_ENDIAN = sys.byteorder == "big"


def symbols(data, f):
    if f == 8:
        return data
    if len(data) & 1:
        data = data + b"\x00"
    out = array("H", data)
    if _BIG_ENDIAN:
        out.byteswap()
    return out


def check_length(nbytes, f):
    nsym = nbytes if f == 8 else (nbytes + 1) // 2
    if nsym >= (1 << f) - 1:
        raise StringTooLong(
            f"{nbytes} bytes give {nsym} symbols; GF(2^{f}) allows at most {(1 << f) - 2}")


def sign(data, ctx, n_sig):
    f = ctx.f
    check_length(len(data), f)
    order = ctx.order
    log = ctx.log_table
    alog = ctx.antilog_ext
    syms = symbols(data, f)
    out = []
    for j in range(1, n_sig + 1):
        # e tracks j * i mod order: the exponent of beta_j^i at position i
        e = 0
        acc = 0
        for p in syms:
            e += j
            if e >= order:
                e -= order
            if p:
                acc ^= alog[log[p] + e]
        out.append(acc)
    return tuple(out)


def sign_many(keys, ctx, n_sig):
    return [sign(k, ctx, n_sig) for k in keys]


def digest_hash(data, seed):
    h = seed
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


def sig_digest_bytes(syms, byte_len, f):
    width = f // 8
    return b"".join(s.to_bytes(width, "little") for s in syms) + byte_len.to_bytes(LEN_BYTES, "little")


def index_of(h, n):
    return (((h * FIB) & MASK64) >> 32) % n


def route_keys(keys, seed, n):
    return np.array([index_of(digest_hash(k, seed), n) for k in keys], dtype=np.int64)


def route_sigs(keys, ctx, n_sig, seed, n):
    f = ctx.f
    return np.array(
        [index_of(digest_hash(sig_digest_bytes(sign(k, ctx, n_sig), len(k), f), seed), n)
         for k in keys],
        dtype=np.int64)


def _pairs(r_out, s_out):
    return np.array(r_out, dtype=np.int64), np.array(s_out, dtype=np.int64)


class KeyTable:
    """Hash table over full key strings (the baseline)."""

    def __init__(self, keys, nbuckets, seed):
        self.keys = keys
        self.nbuckets = nbuckets
        self.seed = seed
        self._buckets = [[] for _ in range(nbuckets)]
        for i, k in enumerate(keys):
            self._buckets[index_of(digest_hash(k, seed), nbuckets)].append(i)

    def buckets(self):
        return [list(b) for b in self._buckets]

    def probe(self, probe_keys):
        keys = self.keys
        buckets = self._buckets
        nb = self.nbuckets
        seed = self.seed
        r_out = []
        s_out = []
        comparisons = 0
        for s, k in enumerate(probe_keys):
            chain = buckets[index_of(digest_hash(k, seed), nb)]
            comparisons += len(chain)
            for r in chain:
                if keys[r] == k:
                    r_out.append(r)
                    s_out.append(s)
        return (*_pairs(r_out, s_out), comparisons)


class SigTable:
    """Hash table over (signature, byte length) digests."""

    def __init__(self, keys, ctx, n_sig, nbuckets, seed):
        self.keys = keys
        self.ctx = ctx
        self.n_sig = n_sig
        self.nbuckets = nbuckets
        self.seed = seed
        self._digests = []
        self._buckets = [[] for _ in range(nbuckets)]
        f = ctx.f
        for i, k in enumerate(keys):
            d = (sign(k, ctx, n_sig), len(k))
            self._digests.append(d)
            self._buckets[index_of(digest_hash(sig_digest_bytes(d[0], d[1], f), seed), nbuckets)].append(i)

    def buckets(self):
        return [list(b) for b in self._buckets]

    def digest(self, i):
        return self._digests[i]

    def probe(self, probe_keys, verify):
        keys = self.keys
        digests = self._digests
        buckets = self._buckets
        ctx = self.ctx
        n_sig = self.n_sig
        nb = self.nbuckets
        seed = self.seed
        f = ctx.f
        r_out = []
        s_out = []
        sig_matches = 0
        comparisons = 0
        for s, k in enumerate(probe_keys):
            d = (sign(k, ctx, n_sig), len(k))
            chain = buckets[index_of(digest_hash(sig_digest_bytes(d[0], d[1], f), seed), nb)]
            comparisons += len(chain)
            for r in chain:
                if digests[r] == d:
                    sig_matches += 1
                    if verify and keys[r] != k:
                        continue
                    r_out.append(r)
                    s_out.append(s)
        return (*_pairs(r_out, s_out), sig_matches, comparisons)


def sign_throughput(pages, ctx, n_sig):
    total = 0
    for p in pages:
        sign(p, ctx, n_sig)
        total += len(p)
    return total
