"""The compiled kernels must agree with the pure-Python reference."""

import random

import numpy as np
import pytest

from sigjoin import _backend, _purepy
from sigjoin.errors import StringTooLong
from sigjoin.gf import build_context

ext = pytest.importorskip("sigjoin._kernels")

CONFIGS = [(16, 1), (16, 2), (16, 3), (8, 1), (8, 4)]


def _keys(seed, count=300, dup=True):
    rng = random.Random(seed)
    keys = [rng.randbytes(rng.randint(0, 70)) for _ in range(count)]
    if dup:
        keys += rng.sample(keys, count // 3)
        rng.shuffle(keys)
    return keys


def test_backend_selection():
    assert _backend.get("python") is _purepy
    assert _backend.get("cython") is ext
    assert _backend.BACKEND in _backend.BACKENDS


@pytest.mark.parametrize("f,n_sig", CONFIGS)
def test_sign_parity(f, n_sig):
    ctx = build_context(f)
    for data in _keys(f * 10 + n_sig) + [b"", b"\x00", bytes(range(256))[: 2 * (f == 16) + 200]]:
        assert tuple(ext.sign(data, ctx, n_sig)) == tuple(_purepy.sign(data, ctx, n_sig))


def test_sign_length_check():
    with pytest.raises(StringTooLong):
        ext.sign(bytes(255), build_context(8), 2)


def test_hash_and_route_parity():
    keys = _keys(3)
    ctx = build_context(16)
    for k in keys[:50]:
        assert ext.digest_hash(k, 12345) == _purepy.digest_hash(k, 12345)
    for n in (1, 7, 8):
        assert np.array_equal(ext.route_keys(keys, 99, n), _purepy.route_keys(keys, 99, n))
        assert np.array_equal(ext.route_sigs(keys, ctx, 2, 99, n), _purepy.route_sigs(keys, ctx, 2, 99, n))


@pytest.mark.parametrize("f,n_sig", CONFIGS)
def test_table_parity(f, n_sig):
    ctx = build_context(f)
    r, s = _keys(f + n_sig), _keys(f + n_sig + 1) + _keys(f + n_sig)[:40]
    a = ext.SigTable(r, ctx, n_sig, 64, 7)
    b = _purepy.SigTable(r, ctx, n_sig, 64, 7)
    assert [list(c) for c in a.buckets()] == [list(c) for c in b.buckets()]
    for i in range(len(r)):
        assert tuple(a.digest(i)[0]) == tuple(b.digest(i)[0]) and a.digest(i)[1] == b.digest(i)[1]
    for verify in (True, False):
        ra, rb = a.probe(s, verify), b.probe(s, verify)
        assert all(np.array_equal(x, y) for x, y in zip(ra[:2], rb[:2]))
        assert tuple(ra[2:]) == tuple(rb[2:])


def test_key_table_parity():
    r, s = _keys(11), _keys(12) + _keys(11)[:50]
    a, b = ext.KeyTable(r, 32, 5), _purepy.KeyTable(r, 32, 5)
    assert [list(c) for c in a.buckets()] == [list(c) for c in b.buckets()]
    ra, rb = a.probe(s), b.probe(s)
    assert all(np.array_equal(x, y) for x, y in zip(ra[:2], rb[:2]))
    assert ra[2] == rb[2]
