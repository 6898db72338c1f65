import random

import pytest
from hypothesis import given, settings, strategies as st

from sigjoin.errors import BaseMismatch, StringTooLong
from sigjoin.gf import build_context, gf_mul, gf_pow
from sigjoin.signature import (AlgebraicSignature, SignatureBase, compute_signature,
                               make_base, signatures_equal, symbolize)

from oracles import naive_signature


def test_symbolize_examples():
    assert symbolize(b"", 16) == []
    assert symbolize(b"\x41\x42", 16) == [0x4241]
    assert symbolize(b"\x41", 16) == [0x0041]
    assert symbolize(b"\x01\x02\x03", 8) == [1, 2, 3]


def test_empty_signature():
    sig = compute_signature(make_base(), b"")
    assert sig.symbols == (0, 0) and sig.byte_len == 0


def test_single_symbol_is_p_times_beta():
    base = make_base(16, 3)
    sig = compute_signature(base, b"\x34\x12")
    assert sig.symbols == tuple(gf_mul(base.ctx, 0x1234, b) for b in base.elements)


def test_f8_two_ones():
    sig = compute_signature(make_base(8, 1), bytes([1, 1]))
    assert sig.symbols == (0x06,)


def test_str_and_bytes_agree():
    base = make_base()
    assert compute_signature(base, "héllo") == compute_signature(base, "héllo".encode())


def test_equality_examples():
    base = make_base()
    a = compute_signature(base, "abc")
    assert signatures_equal(a, compute_signature(base, "abc"))
    assert not signatures_equal(a, compute_signature(base, "abd"))


def test_trailing_zero_byte_differs_by_length():
    base = make_base()
    a, b = compute_signature(base, b"a"), compute_signature(base, b"a\x00")
    assert a.symbols == b.symbols
    assert not signatures_equal(a, b)


def test_base_mismatch():
    other = SignatureBase(build_context(16), 2)
    a = compute_signature(make_base(), b"xy")
    b = compute_signature(other, b"xy")
    with pytest.raises(BaseMismatch):
        signatures_equal(a, b)
    with pytest.raises(BaseMismatch):
        signatures_equal(a, compute_signature(make_base(8, 2), b"xy"))


def test_hex_highest_component_first():
    sig = AlgebraicSignature((0x0001, 0xABCD), 3, 16)
    assert sig.hex() == "abcd0001"
    assert str(AlgebraicSignature((0x6,), 2, 8)) == "06"


def test_length_limit():
    base = make_base(16, 2)
    compute_signature(base, bytes(131_068))
    with pytest.raises(StringTooLong):
        compute_signature(base, bytes(131_069))
    compute_signature(make_base(8, 1), bytes(254))
    with pytest.raises(StringTooLong):
        compute_signature(make_base(8, 1), bytes(255))


def test_n_sig_bounds():
    with pytest.raises(ValueError):
        make_base(16, 0)


@pytest.mark.parametrize("n_sig", [1, 2, 3, 4])
def test_detection_guarantee_f8(n_sig):
    rng = random.Random(n_sig)
    base = make_base(8, n_sig)
    for _ in range(10_000):
        length = rng.randint(1, 254)
        data = bytearray(rng.randbytes(length))
        before = compute_signature(base, bytes(data))
        for pos in rng.sample(range(length), min(length, rng.randint(1, n_sig))):
            data[pos] ^= rng.randint(1, 255)
        assert compute_signature(base, bytes(data)) != before


def test_oracle_equivalence():
    rng = random.Random(7)
    for i in range(1000):
        f, n_sig = [(16, 2), (8, 4), (16, 3), (8, 1)][i % 4]
        data = rng.randbytes(rng.randint(0, 120))
        assert compute_signature(make_base(f, n_sig), data).symbols == naive_signature(data, f, n_sig)


@given(st.integers(0, 60).flatmap(lambda n: st.tuples(st.binary(min_size=n, max_size=n),
                                                       st.binary(min_size=n, max_size=n))))
def test_linearity(pair):
    p, q = pair
    base = make_base(16, 3)
    x = bytes(a ^ b for a, b in zip(p, q))
    sp, sq, sx = (compute_signature(base, d).symbols for d in (p, q, x))
    assert sx == tuple(a ^ b for a, b in zip(sp, sq))


@given(st.binary(max_size=80), st.integers(0, 20))
def test_shift_property(data, k):
    base = make_base(16, 2)
    shifted = compute_signature(base, bytes(2 * k) + data)
    plain = compute_signature(base, data)
    # odd-length data gains a padded symbol either way, so positions line up
    expect = tuple(gf_mul(base.ctx, s, gf_pow(base.ctx, b, k)) for s, b in zip(plain.symbols, base.elements))
    assert shifted.symbols == expect


@settings(max_examples=50)
@given(st.binary(max_size=300))
def test_digest_bytes_layout(data):
    sig = compute_signature(make_base(), data)
    raw = sig.digest_bytes()
    assert len(raw) == make_base().digest_size == 8
    assert int.from_bytes(raw[4:], "little") == len(data)
    assert [int.from_bytes(raw[i:i + 2], "little") for i in (0, 2)] == list(sig.symbols)


def test_random_collisions_100_byte():
    rng = random.Random(2024)
    base = make_base()
    collisions = 0
    for _ in range(100_000):
        a, b = rng.randbytes(100), rng.randbytes(100)
        if a != b and compute_signature(base, a) == compute_signature(base, b):
            collisions += 1
    assert collisions == 0
