"""Exact streaming accumulation and the double-double carrier.

Every prime sum in the package is accumulated *exactly*: each float64 term is
split into four 40-bit integer limbs on a fixed binary grid and the limbs are
summed as integers.  Integer addition is associative, so a total does not
depend on segment boundaries, worker count, merge order or where a run was
interrupted and resumed.  The exact total is then rounded once into an
:class:`ExtendedReal` (hi + lo, about 31 significant digits).

The grid covers terms with ``|t| < 2**8`` down to ``2**-152``; any bits of a
term below that are truncated (never relevant for the sums computed here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

TOP_EXP = 8
LIMB_BITS = 40
N_LIMBS = 4
UNIT_EXP = TOP_EXP - LIMB_BITS * N_LIMBS  # one integer unit == 2**UNIT_EXP

_SCALE_IN = 2.0 ** (LIMB_BITS - TOP_EXP)
_SCALE_LIMB = 2.0**LIMB_BITS
# limb magnitudes are < 2**40, so 2**21 of them cannot overflow int64
_CHUNK = 1 << 21


def exact_sum(terms) -> int:
    """Return the exact sum of float64 ``terms`` in units of ``2**UNIT_EXP``."""
    t = np.asarray(terms, dtype=np.float64).ravel()
    if t.size == 0:
        return 0
    if not np.isfinite(t).all():
        raise ValueError("non-finite term in exact sum")
    if np.abs(t).max() >= 2.0**TOP_EXP:
        raise ValueError(f"term magnitude exceeds 2**{TOP_EXP}")
    total = 0
    for start in range(0, t.size, _CHUNK):
        r = t[start : start + _CHUNK] * _SCALE_IN
        for k in range(N_LIMBS):
            limb = np.floor(r)
            r = (r - limb) * _SCALE_LIMB
            total += int(limb.astype(np.int64).sum()) << (LIMB_BITS * (N_LIMBS - 1 - k))
    return total


def fixed_from_float(value: float) -> int:
    """Exact fixed-point image of a single float (must lie on the grid)."""
    return exact_sum(np.array([value]))


def fixed_to_float(n: int) -> float:
    """Correctly rounded float of a fixed-point integer."""
    return _ldexp_int(n)


def _ldexp_int(n: int) -> float:
    # int / int true division is correctly rounded in CPython
    if UNIT_EXP < 0:
        return n / (1 << -UNIT_EXP)
    return float(n << UNIT_EXP)


def _float_to_units(x: float) -> int:
    num, den = x.as_integer_ratio()
    scaled = Fraction(num, den) * (Fraction(2) ** -UNIT_EXP)
    if scaled.denominator != 1:
        raise ValueError(f"{x!r} is not representable on the fixed grid")
    return scaled.numerator


@dataclass(frozen=True)
class ExtendedReal:
    """Unevaluated sum ``hi + lo`` with ``|lo| <= ulp(hi) / 2``."""

    hi: float
    lo: float = 0.0

    @classmethod
    def from_fixed(cls, n: int) -> ExtendedReal:
        hi = _ldexp_int(n)
        lo = _ldexp_int(n - _float_to_units(hi))
        return cls(hi, lo)

    def to_fixed(self) -> int:
        """Inverse of :meth:`from_fixed` (exact when the value is on the grid)."""
        return _float_to_units(self.hi) + _float_to_units(self.lo)

    def __float__(self) -> float:
        return self.hi + self.lo

    def __neg__(self) -> ExtendedReal:
        return ExtendedReal(-self.hi, -self.lo)

    def __add__(self, other) -> ExtendedReal:
        if not isinstance(other, ExtendedReal):
            other = ExtendedReal(float(other))
        s, e = two_sum(self.hi, other.hi)
        e += self.lo + other.lo
        hi, lo = two_sum(s, e)
        return ExtendedReal(hi, lo)

    __radd__ = __add__

    def __sub__(self, other) -> ExtendedReal:
        if not isinstance(other, ExtendedReal):
            other = ExtendedReal(float(other))
        return self + (-other)

    def exp(self) -> float:
        return math.exp(self.hi) * (1.0 + self.lo)


def two_sum(a, b):
    """Knuth's error-free addition; works elementwise on numpy arrays."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Dekker's error-free product (no FMA needed); elementwise on arrays."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err
