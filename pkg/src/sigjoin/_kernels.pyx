# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled join kernels: signature computation, digest hashing, build/probe.

Bit-exact twin of ``sigjoin._purepy``.
"""

from libc.stdint cimport int32_t, int64_t, uint16_t, uint32_t, uint64_t
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcmp, memcpy, memset
from posix.stdlib cimport posix_memalign
from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_GET_SIZE
from cpython.list cimport PyList_GET_ITEM, PyList_GET_SIZE

import numpy as np

from .errors import StringTooLong

NAME = "cython"

cdef uint64_t FNV_PRIME = 0x100000001B3ULL
cdef uint64_t FIB = 0x9E3779B97F4A7C15ULL
cdef int LEN_BYTES = 4


cdef inline uint64_t _fnv(const unsigned char* p, Py_ssize_t n, uint64_t h) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        h = (h ^ p[i]) * FNV_PRIME
    return h


cdef inline Py_ssize_t _index(uint64_t h, Py_ssize_t n) noexcept nogil:
    return <Py_ssize_t>(((h * FIB) >> 32) % <uint64_t>n)


cdef inline uint64_t _sig_hash(const uint16_t* syms, int n_sig, int f,
                               Py_ssize_t byte_len, uint64_t h) noexcept nogil:
    # Same byte stream as _purepy.sig_digest_bytes: symbols little-endian,
    # then a 4-byte little-endian length.
    cdef int j
    cdef uint32_t ln = <uint32_t>byte_len
    for j in range(n_sig):
        h = (h ^ (syms[j] & 0xFF)) * FNV_PRIME
        if f == 16:
            h = (h ^ (syms[j] >> 8)) * FNV_PRIME
    for j in range(LEN_BYTES):
        h = (h ^ ((ln >> (8 * j)) & 0xFF)) * FNV_PRIME
    return h


cdef inline void _sign2_16(const unsigned char* p, Py_ssize_t nbytes,
                           const uint16_t* log, const uint16_t* alog,
                           uint16_t* out) noexcept nogil:
    # Default configuration: two components over GF(2^16). Positions stay
    # below the group order, so lp + 2*i < 3*order and the tiled antilog
    # table needs no modular reduction.
    cdef Py_ssize_t i, half = nbytes >> 1
    cdef uint32_t sym, lp, sym2, lp2
    cdef uint16_t a0 = 0, a1 = 0, b0 = 0, b1 = 0
    # Two symbols per step into independent accumulators.
    i = 1
    while i + 1 <= half:
        sym = p[2 * i - 2] | (<uint32_t>p[2 * i - 1] << 8)
        sym2 = p[2 * i] | (<uint32_t>p[2 * i + 1] << 8)
        if sym:
            lp = log[sym] + <uint32_t>i
            a0 ^= alog[lp]
            a1 ^= alog[lp + i]
        if sym2:
            lp2 = log[sym2] + <uint32_t>(i + 1)
            b0 ^= alog[lp2]
            b1 ^= alog[lp2 + i + 1]
        i += 2
    if i == half:
        sym = p[2 * i - 2] | (<uint32_t>p[2 * i - 1] << 8)
        if sym:
            lp = log[sym] + <uint32_t>i
            a0 ^= alog[lp]
            a1 ^= alog[lp + i]
    a0 ^= b0
    a1 ^= b1
    if nbytes & 1:
        sym = p[nbytes - 1]
        if sym:
            i = half + 1
            lp = log[sym] + <uint32_t>i
            a0 ^= alog[lp]
            a1 ^= alog[lp + i]
    out[0] = a0
    out[1] = a1


cdef inline void _sign(const unsigned char* p, Py_ssize_t nbytes, int f, int n_sig,
                       const uint16_t* log, const uint16_t* alog, uint32_t order,
                       uint16_t* out, uint32_t* e) noexcept nogil:
    cdef Py_ssize_t i, nsym
    cdef int j
    cdef uint32_t sym, lp
    if f == 16 and n_sig == 2:
        _sign2_16(p, nbytes, log, alog, out)
        return
    for j in range(n_sig):
        out[j] = 0
        e[j] = 0
    nsym = nbytes if f == 8 else (nbytes + 1) >> 1
    for i in range(nsym):
        if f == 8:
            sym = p[i]
        elif 2 * i + 1 < nbytes:
            sym = p[2 * i] | (<uint32_t>p[2 * i + 1] << 8)
        else:
            sym = p[2 * i]
        # e[j] tracks (j+1) * (i+1) mod order, the exponent of beta_j^i.
        for j in range(n_sig):
            e[j] += j + 1
            if e[j] >= order:
                e[j] -= order
        if sym:
            lp = log[sym]
            for j in range(n_sig):
                out[j] ^= alog[lp + e[j]]


cdef extern from "sys/mman.h" nogil:
    int madvise(void* addr, size_t length, int advice)
    int MADV_HUGEPAGE


cdef size_t HUGE_PAGE = 2 * 1024 * 1024


cdef class _PackedTables:
    """Log and tiled antilog tables copied into one 2 MB-aligned block.

    Kept on a transparent huge page where the OS allows it, so the random
    lookups of signing stay within one TLB entry.
    """

    cdef void* block
    cdef const uint16_t* log
    cdef const uint16_t* alog
    cdef object ctx

    def __cinit__(self, ctx):
        cdef const uint16_t[::1] log = ctx.log_table
        cdef const uint16_t[::1] alog = ctx.antilog_ext
        cdef size_t nlog = log.shape[0], nalog = alog.shape[0]
        cdef size_t size = (nlog + nalog) * sizeof(uint16_t)
        size = (size + HUGE_PAGE - 1) // HUGE_PAGE * HUGE_PAGE
        if posix_memalign(&self.block, HUGE_PAGE, size) != 0:
            raise MemoryError()
        madvise(self.block, size, MADV_HUGEPAGE)
        memcpy(self.block, &log[0], nlog * sizeof(uint16_t))
        memcpy(<char*>self.block + nlog * sizeof(uint16_t), &alog[0], nalog * sizeof(uint16_t))
        self.log = <const uint16_t*>self.block
        self.alog = self.log + nlog
        self.ctx = ctx

    def __dealloc__(self):
        free(self.block)


cdef dict _packed = {}


cdef _PackedTables _packed_for(ctx):
    cdef _PackedTables t = _packed.get(id(ctx))
    if t is None or t.ctx is not ctx:
        t = _PackedTables(ctx)
        _packed[id(ctx)] = t
    return t


cdef inline int _check_len(Py_ssize_t nbytes, int f) except -1:
    cdef Py_ssize_t nsym = nbytes if f == 8 else (nbytes + 1) // 2
    if nsym >= (1 << f) - 1:
        raise StringTooLong(
            f"{nbytes} bytes give {nsym} symbols; GF(2^{f}) allows at most {(1 << f) - 2}")
    return 0


cdef class _Tables:
    cdef _PackedTables packed
    cdef const uint16_t* log
    cdef const uint16_t* alog
    cdef int f
    cdef int n_sig
    cdef uint32_t order
    cdef uint32_t* scratch

    def __cinit__(self, ctx, int n_sig):
        self.packed = _packed_for(ctx)
        self.log = self.packed.log
        self.alog = self.packed.alog
        self.f = ctx.f
        self.order = ctx.order
        self.n_sig = n_sig
        self.scratch = <uint32_t*>malloc(max(n_sig, 1) * sizeof(uint32_t))
        if self.scratch == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.scratch)

    cdef inline void sign_into(self, const unsigned char* p, Py_ssize_t n, uint16_t* out) noexcept:
        _sign(p, n, self.f, self.n_sig, self.log, self.alog, self.order, out, self.scratch)


def sign(bytes data, ctx, int n_sig):
    cdef _Tables t = _Tables(ctx, n_sig)
    cdef Py_ssize_t n = PyBytes_GET_SIZE(data)
    _check_len(n, t.f)
    cdef uint16_t* out = <uint16_t*>malloc(max(n_sig, 1) * sizeof(uint16_t))
    if out == NULL:
        raise MemoryError()
    try:
        t.sign_into(<const unsigned char*>PyBytes_AS_STRING(data), n, out)
        return tuple([out[j] for j in range(n_sig)])
    finally:
        free(out)


def sign_many(list keys, ctx, int n_sig):
    """Signatures of every key; returns a list of symbol tuples."""
    cdef _Tables t = _Tables(ctx, n_sig)
    cdef Py_ssize_t i, m = PyList_GET_SIZE(keys)
    cdef object k
    cdef uint16_t* out = <uint16_t*>malloc(max(n_sig, 1) * sizeof(uint16_t))
    if out == NULL:
        raise MemoryError()
    res = []
    try:
        for i in range(m):
            k = <object>PyList_GET_ITEM(keys, i)
            _check_len(PyBytes_GET_SIZE(k), t.f)
            t.sign_into(<const unsigned char*>PyBytes_AS_STRING(k), PyBytes_GET_SIZE(k), out)
            res.append(tuple([out[j] for j in range(n_sig)]))
    finally:
        free(out)
    return res


def sign_throughput(list pages, ctx, int n_sig):
    """Sign every page, discarding results; returns total bytes signed."""
    cdef _Tables t = _Tables(ctx, n_sig)
    cdef Py_ssize_t i, total = 0, m = PyList_GET_SIZE(pages)
    cdef object k
    cdef uint16_t* out = <uint16_t*>malloc(max(n_sig, 1) * sizeof(uint16_t))
    if out == NULL:
        raise MemoryError()
    try:
        for i in range(m):
            k = <object>PyList_GET_ITEM(pages, i)
            _check_len(PyBytes_GET_SIZE(k), t.f)
            t.sign_into(<const unsigned char*>PyBytes_AS_STRING(k), PyBytes_GET_SIZE(k), out)
            total += PyBytes_GET_SIZE(k)
    finally:
        free(out)
    return total


def digest_hash(data, uint64_t seed):
    cdef const unsigned char[::1] view = bytes(data)
    if view.shape[0] == 0:
        return seed
    return _fnv(&view[0], view.shape[0], seed)


def index_of(uint64_t h, Py_ssize_t n):
    return _index(h, n)


def route_keys(list keys, uint64_t seed, Py_ssize_t n):
    cdef Py_ssize_t i, m = PyList_GET_SIZE(keys)
    cdef object k
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] o = out
    for i in range(m):
        k = <object>PyList_GET_ITEM(keys, i)
        o[i] = _index(_fnv(<const unsigned char*>PyBytes_AS_STRING(k), PyBytes_GET_SIZE(k), seed), n)
    return out


def route_sigs(list keys, ctx, int n_sig, uint64_t seed, Py_ssize_t n):
    cdef _Tables t = _Tables(ctx, n_sig)
    cdef Py_ssize_t i, ln, m = PyList_GET_SIZE(keys)
    cdef object k
    cdef uint16_t* sig = <uint16_t*>malloc(max(n_sig, 1) * sizeof(uint16_t))
    if sig == NULL:
        raise MemoryError()
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] o = out
    try:
        for i in range(m):
            k = <object>PyList_GET_ITEM(keys, i)
            ln = PyBytes_GET_SIZE(k)
            _check_len(ln, t.f)
            t.sign_into(<const unsigned char*>PyBytes_AS_STRING(k), ln, sig)
            o[i] = _index(_sig_hash(sig, n_sig, t.f, ln, seed), n)
    finally:
        free(sig)
    return out


cdef class _PairBuffer:
    cdef int64_t* r
    cdef int64_t* s
    cdef Py_ssize_t n, cap

    def __cinit__(self):
        self.cap = 1024
        self.n = 0
        self.r = <int64_t*>malloc(self.cap * sizeof(int64_t))
        self.s = <int64_t*>malloc(self.cap * sizeof(int64_t))
        if self.r == NULL or self.s == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.r)
        free(self.s)

    cdef int push(self, int64_t r, int64_t s) except -1:
        cdef int64_t* nr
        cdef int64_t* ns
        if self.n == self.cap:
            nr = <int64_t*>realloc(self.r, 2 * self.cap * sizeof(int64_t))
            if nr == NULL:
                raise MemoryError()
            self.r = nr
            ns = <int64_t*>realloc(self.s, 2 * self.cap * sizeof(int64_t))
            if ns == NULL:
                raise MemoryError()
            self.s = ns
            self.cap *= 2
        self.r[self.n] = r
        self.s[self.n] = s
        self.n += 1
        return 0

    cdef tuple arrays(self):
        r = np.empty(self.n, dtype=np.int64)
        s = np.empty(self.n, dtype=np.int64)
        cdef int64_t[::1] rv = r
        cdef int64_t[::1] sv = s
        cdef Py_ssize_t i
        for i in range(self.n):
            rv[i] = self.r[i]
            sv[i] = self.s[i]
        return r, s


cdef class _ChainTable:
    cdef int32_t* head
    cdef int32_t* nxt
    cdef readonly Py_ssize_t nbuckets
    cdef readonly Py_ssize_t m
    cdef readonly uint64_t seed
    cdef readonly list keys

    cdef int alloc(self, list keys, Py_ssize_t nbuckets, uint64_t seed) except -1:
        if nbuckets < 1:
            raise ValueError("nbuckets must be >= 1")
        self.keys = keys
        self.m = PyList_GET_SIZE(keys)
        self.nbuckets = nbuckets
        self.seed = seed
        self.head = <int32_t*>malloc(nbuckets * sizeof(int32_t))
        self.nxt = <int32_t*>malloc(max(self.m, 1) * sizeof(int32_t))
        if self.head == NULL or self.nxt == NULL:
            raise MemoryError()
        memset(self.head, 0xFF, nbuckets * sizeof(int32_t))
        return 0

    def __dealloc__(self):
        free(self.head)
        free(self.nxt)

    def buckets(self):
        out = []
        cdef Py_ssize_t b
        cdef int32_t i
        for b in range(self.nbuckets):
            chain = []
            i = self.head[b]
            while i >= 0:
                chain.append(i)
                i = self.nxt[i]
            out.append(chain)
        return out


cdef class KeyTable(_ChainTable):
    """Hash table over full key strings (the baseline)."""

    def __cinit__(self, list keys, Py_ssize_t nbuckets, uint64_t seed):
        self.alloc(keys, nbuckets, seed)
        cdef Py_ssize_t i, b
        cdef object k
        # Reverse insertion at the head keeps every chain in ascending row order.
        for i in range(self.m - 1, -1, -1):
            k = <object>PyList_GET_ITEM(keys, i)
            b = _index(_fnv(<const unsigned char*>PyBytes_AS_STRING(k), PyBytes_GET_SIZE(k), seed),
                       nbuckets)
            self.nxt[i] = self.head[b]
            self.head[b] = <int32_t>i

    def probe(self, list probe_keys):
        cdef Py_ssize_t s, n = PyList_GET_SIZE(probe_keys), ln
        cdef int64_t comparisons = 0
        cdef int32_t r
        cdef object k, rk
        cdef const char* p
        cdef _PairBuffer out = _PairBuffer()
        for s in range(n):
            k = <object>PyList_GET_ITEM(probe_keys, s)
            p = PyBytes_AS_STRING(k)
            ln = PyBytes_GET_SIZE(k)
            r = self.head[_index(_fnv(<const unsigned char*>p, ln, self.seed), self.nbuckets)]
            while r >= 0:
                comparisons += 1
                rk = <object>PyList_GET_ITEM(self.keys, r)
                if PyBytes_GET_SIZE(rk) == ln and memcmp(PyBytes_AS_STRING(rk), p, ln) == 0:
                    out.push(r, s)
                r = self.nxt[r]
        r_arr, s_arr = out.arrays()
        return r_arr, s_arr, comparisons


cdef class SigTable(_ChainTable):
    """Hash table over (signature, byte length) digests."""

    cdef _Tables t
    cdef uint16_t* syms
    cdef int32_t* lens
    cdef uint16_t* scratch
    cdef readonly int n_sig

    def __cinit__(self, list keys, ctx, int n_sig, Py_ssize_t nbuckets, uint64_t seed):
        self.alloc(keys, nbuckets, seed)
        self.t = _Tables(ctx, n_sig)
        self.n_sig = n_sig
        self.syms = <uint16_t*>malloc(max(self.m * n_sig, 1) * sizeof(uint16_t))
        self.lens = <int32_t*>malloc(max(self.m, 1) * sizeof(int32_t))
        self.scratch = <uint16_t*>malloc(max(n_sig, 1) * sizeof(uint16_t))
        if self.syms == NULL or self.lens == NULL or self.scratch == NULL:
            raise MemoryError()
        cdef Py_ssize_t i, b, ln
        cdef object k
        cdef int f = self.t.f
        for i in range(self.m - 1, -1, -1):
            k = <object>PyList_GET_ITEM(keys, i)
            ln = PyBytes_GET_SIZE(k)
            _check_len(ln, f)
            self.t.sign_into(<const unsigned char*>PyBytes_AS_STRING(k), ln, &self.syms[i * n_sig])
            self.lens[i] = <int32_t>ln
            b = _index(_sig_hash(&self.syms[i * n_sig], n_sig, f, ln, seed), nbuckets)
            self.nxt[i] = self.head[b]
            self.head[b] = <int32_t>i

    def __dealloc__(self):
        free(self.syms)
        free(self.lens)
        free(self.scratch)

    def digest(self, Py_ssize_t i):
        if not 0 <= i < self.m:
            raise IndexError(i)
        return tuple([self.syms[i * self.n_sig + j] for j in range(self.n_sig)]), self.lens[i]

    def probe(self, list probe_keys, bint verify):
        cdef Py_ssize_t s, n = PyList_GET_SIZE(probe_keys), ln
        cdef int64_t comparisons = 0, sig_matches = 0
        cdef int32_t r
        cdef int j, n_sig = self.n_sig, f = self.t.f
        cdef object k, rk
        cdef const char* p
        cdef uint16_t* sig = self.scratch
        cdef uint16_t* cand
        cdef _PairBuffer out = _PairBuffer()
        cdef bint same
        for s in range(n):
            k = <object>PyList_GET_ITEM(probe_keys, s)
            p = PyBytes_AS_STRING(k)
            ln = PyBytes_GET_SIZE(k)
            _check_len(ln, f)
            self.t.sign_into(<const unsigned char*>p, ln, sig)
            r = self.head[_index(_sig_hash(sig, n_sig, f, ln, self.seed), self.nbuckets)]
            while r >= 0:
                comparisons += 1
                if self.lens[r] == ln:
                    cand = &self.syms[r * n_sig]
                    same = True
                    for j in range(n_sig):
                        if cand[j] != sig[j]:
                            same = False
                            break
                    if same:
                        sig_matches += 1
                        if verify:
                            rk = <object>PyList_GET_ITEM(self.keys, r)
                            if memcmp(PyBytes_AS_STRING(rk), p, ln) == 0:
                                out.push(r, s)
                        else:
                            out.push(r, s)
                r = self.nxt[r]
        r_arr, s_arr = out.arrays()
        return r_arr, s_arr, sig_matches, comparisons
