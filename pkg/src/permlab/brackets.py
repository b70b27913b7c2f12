"""Certified rational bracketing of irrational quantities.

Comparisons against sqrt and exp values must have exact pass/fail
semantics, so those values are enclosed in rational intervals with
proven error bounds (integer square roots for sqrt, Taylor series with
an explicit tail majorant for exp).  A strict inequality is asserted
only when it holds between the far endpoints; overlapping brackets are
refined by the caller, never rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ContractError

DEFAULT_PREC = 96


@dataclass(frozen=True)
class Interval:
    """Closed rational interval [lo, hi] certified to contain a value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ContractError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, q) -> "Interval":
        q = Fraction(q)
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, q) -> bool:
        return self.lo <= Fraction(q) <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) + (-self)

    def __mul__(self, other):
        other = _as_interval(other)
        prods = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ContractError("reciprocal of an interval containing 0")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * _as_interval(other).reciprocal()


def _as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(x)


def certainly_lt(a, b) -> bool:
    """True only when every point of ``a`` is below every point of ``b``."""
    return _as_interval(a).hi < _as_interval(b).lo


def certainly_le(a, b) -> bool:
    return _as_interval(a).hi <= _as_interval(b).lo


def sqrt_bracket(q, prec_bits: int = DEFAULT_PREC) -> Interval:
    """Interval of width 2**-prec_bits / denominator containing sqrt(q)."""
    q = Fraction(q)
    if q < 0:
        raise ContractError(f"sqrt of negative {q}")
    if q == 0:
        return Interval.point(0)
    a, b = q.numerator, q.denominator
    scale = 1 << prec_bits
    root = math.isqrt(a * b * scale * scale)
    lo = Fraction(root, b * scale)
    hi = Fraction(root + 1, b * scale)
    return Interval(lo, hi)


def _exp_unit_bracket(y: Fraction, prec_bits: int) -> Interval:
    """Taylor enclosure of exp(y) for 0 <= y <= 1."""
    target = Fraction(1, 1 << prec_bits)
    term = Fraction(1)
    total = Fraction(1)
    k = 0
    while True:
        k += 1
        term = term * y / k
        total += term
        # Remaining tail is at most term * sum_{j>=1} (y/(k+1))^j majorized
        # geometrically; for y <= 1 this is term / k.
        tail_hi = term / k
        if tail_hi <= target or k > 4 * prec_bits + 16:
            return Interval(total, total + tail_hi)


def exp_bracket(x, prec_bits: int = DEFAULT_PREC) -> Interval:
    """Certified rational enclosure of exp(x) for rational x."""
    x = Fraction(x)
    if x == 0:
        return Interval.point(1)
    if x < 0:
        return exp_bracket(-x, prec_bits).reciprocal()
    halvings = 0
    y = x
    while y > 1:
        y /= 2
        halvings += 1
    # Each squaring roughly doubles the relative error, so carry extra bits.
    iv = _exp_unit_bracket(y, prec_bits + 2 * halvings + 4)
    for _ in range(halvings):
        iv = iv * iv
    return iv
