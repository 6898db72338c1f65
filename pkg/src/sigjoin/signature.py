"""Algebraic signatures of byte strings.

Component ``j`` (1-based) of the signature of a string with symbols
``p_1 .. p_l`` is ``sum_i p_i * beta_j**i`` in GF(2^f), where the base
element ``beta_j = alpha**j``. Two strings that differ in at most ``n_sig``
symbol positions always get different ``n_sig``-symbol signatures, as long
as ``l < 2^f - 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from . import _backend
from ._purepy import check_length, sig_digest_bytes, symbols
from .errors import BaseMismatch
from .gf import GfContext, build_context, gf_pow

_base_ids = itertools.count(1)

#: Bytes used to store a signature's length field.
LENGTH_FIELD_BYTES = 4


@dataclass(frozen=True, eq=False)
class SignatureBase:
    """The vector (alpha^1 .. alpha^n_sig) a signature is computed against."""

    ctx: GfContext
    n_sig: int
    elements: tuple[int, ...] = field(init=False)
    tag: int = field(init=False)

    def __post_init__(self):
        if not 1 <= self.n_sig < self.ctx.order:
            raise ValueError(f"n_sig must be in [1, {self.ctx.order - 1}], got {self.n_sig}")
        object.__setattr__(self, "elements",
                           tuple(gf_pow(self.ctx, self.ctx.alpha, j) for j in range(1, self.n_sig + 1)))
        object.__setattr__(self, "tag", next(_base_ids))

    @property
    def f(self) -> int:
        return self.ctx.f

    @property
    def config(self) -> tuple[int, int]:
        return (self.ctx.f, self.n_sig)

    @property
    def digest_size(self) -> int:
        """Stored bytes per signature: the symbols plus the length field."""
        return self.n_sig * self.ctx.f // 8 + LENGTH_FIELD_BYTES


@lru_cache(maxsize=None)
def make_base(f: int = 16, n_sig: int = 2) -> SignatureBase:
    """Shared base for GF(2^f) with ``n_sig`` components.

    The defaults give 4-byte signatures.
    """
    return SignatureBase(build_context(f), n_sig)


@dataclass(frozen=True)
class AlgebraicSignature:
    symbols: tuple[int, ...]
    byte_len: int
    f: int = field(default=16, compare=False)
    base_tag: int = field(default=0, compare=False, repr=False)

    def hex(self) -> str:
        """Lowercase hex of the symbols, highest component first."""
        width = self.f // 4
        return "".join(f"{s:0{width}x}" for s in reversed(self.symbols))

    def digest_bytes(self) -> bytes:
        """Canonical byte form hashed by the join tables."""
        return sig_digest_bytes(self.symbols, self.byte_len, self.f)

    def __str__(self) -> str:
        return self.hex()


def symbolize(data: bytes, f: int) -> list[int]:
    """Split ``data`` into GF(2^f) symbols.

    For f=16, byte pairs are packed low byte first and an odd trailing byte
    gets a zero high byte.
    """
    check_length(len(data), f)
    return list(symbols(bytes(data), f))


def compute_signature(base: SignatureBase, data: bytes | str) -> AlgebraicSignature:
    if isinstance(data, str):
        data = data.encode("utf-8")
    data = bytes(data)
    syms = _backend.kernels.sign(data, base.ctx, base.n_sig)
    return AlgebraicSignature(tuple(syms), len(data), base.ctx.f, base.tag)


def signatures_equal(a: AlgebraicSignature, b: AlgebraicSignature) -> bool:
    if a.base_tag != b.base_tag or a.f != b.f or len(a.symbols) != len(b.symbols):
        raise BaseMismatch("signatures were computed against different bases")
    return a.byte_len == b.byte_len and a.symbols == b.symbols
