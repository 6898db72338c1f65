"""Arithmetic in GF(2^8) and GF(2^16) through log/antilog tables."""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NotPrimitiveError, UnsupportedFieldError

#: Reduction polynomials, bit i set for the x^i term.
PRIMITIVE_POLYS = {
    8: 0x11D,     # x^8 + x^4 + x^3 + x^2 + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}

ALPHA = 2


@dataclass(frozen=True, eq=False)
class GfContext:
    """Tables for one field GF(2^f).

    ``log_table[x]`` is the exponent of ``x`` for non-zero ``x`` (slot 0 is
    unused and holds 0). ``antilog_table[e]`` is ``alpha**e`` for
    ``0 <= e < 2^f - 1``. ``antilog_ext`` tiles the antilog table three
    times so that ``antilog_ext[e]`` is valid for any ``e < 3 * (2^f - 1)``
    without modular reduction.
    """

    f: int
    primitive_poly: int
    log_table: array = field(repr=False)
    antilog_table: array = field(repr=False)
    antilog_ext: array = field(repr=False)
    alpha: int = ALPHA

    @property
    def order(self) -> int:
        """Size of the multiplicative group, 2^f - 1."""
        return (1 << self.f) - 1

    @property
    def size(self) -> int:
        return 1 << self.f

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return gf_mul(self, a, b)

    def pow(self, a: int, k: int) -> int:
        return gf_pow(self, a, k)


def _build(f: int, poly: int) -> GfContext:
    size = 1 << f
    order = size - 1
    log = array("H", bytes(2 * size))
    antilog = array("H", bytes(2 * order))
    seen = bytearray(size)
    x = 1
    for e in range(order):
        if seen[x]:
            raise NotPrimitiveError(
                f"polynomial {poly:#x} is not primitive: alpha has order {e}")
        seen[x] = 1
        antilog[e] = x
        log[x] = e
        x <<= 1
        if x & size:
            x ^= poly
    if x != 1:
        raise NotPrimitiveError(f"polynomial {poly:#x} does not reduce alpha^{order} to 1")
    return GfContext(f, poly, log, antilog, antilog * 3)


@lru_cache(maxsize=None)
def build_context(f: int) -> GfContext:
    """Return the (cached, immutable) context for GF(2^f), f in {8, 16}."""
    if f not in PRIMITIVE_POLYS:
        raise UnsupportedFieldError(f"field width must be 8 or 16, got {f!r}")
    return _build(f, PRIMITIVE_POLYS[f])


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(ctx: GfContext, a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return ctx.antilog_ext[ctx.log_table[a] + ctx.log_table[b]]


def gf_pow(ctx: GfContext, a: int, k: int) -> int:
    """``a`` raised to the non-negative power ``k``; ``0**0`` is 1."""
    if k < 0:
        raise ValueError("exponent must be non-negative")
    if k == 0:
        return 1
    if a == 0:
        return 0
    return ctx.antilog_table[(ctx.log_table[a] * k) % ctx.order]
