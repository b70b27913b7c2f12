from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permlab.brackets import (
    Interval,
    certainly_le,
    certainly_lt,
    exp_bracket,
    sqrt_bracket,
)
from permlab.errors import ContractError

fracs = st.fractions(min_value=-8, max_value=8)
pos_fracs = st.fractions(min_value=Fraction(1, 64), max_value=8)


class TestInterval:
    def test_point_and_width(self):
        iv = Interval.point(Fraction(1, 3))
        assert iv.width == 0
        assert iv.midpoint == Fraction(1, 3)
        assert Fraction(1, 3) in iv

    def test_order_validated(self):
        with pytest.raises(ContractError):
            Interval(Fraction(1), Fraction(0))

    @given(fracs, fracs, fracs, fracs)
    def test_arithmetic_contains_true_value(self, a, b, x, y):
        lo1, hi1 = min(a, b), max(a, b)
        lo2, hi2 = min(x, y), max(x, y)
        iv1, iv2 = Interval(lo1, hi1), Interval(lo2, hi2)
        mid1 = (lo1 + hi1) / 2
        mid2 = (lo2 + hi2) / 2
        assert mid1 + mid2 in iv1 + iv2
        assert mid1 - mid2 in iv1 - iv2
        assert mid1 * mid2 in iv1 * iv2

    def test_scalar_mixing(self):
        iv = Interval(Fraction(1), Fraction(2))
        assert (3 - iv).lo == 1
        assert (Fraction(1, 2) * iv).hi == 1
        assert (iv + 1).lo == 2

    def test_reciprocal_requires_sign(self):
        iv = Interval(Fraction(1, 2), Fraction(2))
        rec = iv.reciprocal()
        assert rec.lo == Fraction(1, 2)
        assert rec.hi == 2
        with pytest.raises(ContractError):
            Interval(Fraction(-1), Fraction(1)).reciprocal()

    def test_containment_of_intervals(self):
        outer = Interval(Fraction(0), Fraction(1))
        inner = Interval(Fraction(1, 4), Fraction(1, 2))
        assert outer.contains_interval(inner)
        assert not inner.contains_interval(outer)


class TestComparisons:
    def test_certainly_lt(self):
        a = Interval(Fraction(0), Fraction(1))
        b = Interval(Fraction(2), Fraction(3))
        assert certainly_lt(a, b)
        assert not certainly_lt(b, a)
        # overlap is not a certified comparison in either direction
        c = Interval(Fraction(1, 2), Fraction(5, 2))
        assert not certainly_lt(a, c)
        assert not certainly_lt(c, a)

    def test_certainly_le_on_touching_endpoints(self):
        a = Interval(Fraction(0), Fraction(1))
        b = Interval(Fraction(1), Fraction(2))
        assert certainly_le(a, b)
        assert not certainly_lt(a, b)
        assert certainly_le(a, Fraction(1))


class TestSqrtBracket:
    @given(pos_fracs)
    def test_bracket_squares_enclose(self, q):
        iv = sqrt_bracket(q)
        assert iv.lo >= 0
        assert iv.lo * iv.lo <= q <= iv.hi * iv.hi

    @given(pos_fracs)
    def test_width_shrinks_with_precision(self, q):
        coarse = sqrt_bracket(q, 16)
        fine = sqrt_bracket(q, 80)
        assert coarse.contains_interval(fine)
        assert fine.width <= Fraction(1, 2**70)

    def test_exact_squares(self):
        iv = sqrt_bracket(Fraction(9, 4))
        assert Fraction(3, 2) in iv

    def test_against_mpmath(self):
        mpmath.mp.dps = 60
        for q in (Fraction(2), Fraction(1, 2), Fraction(7, 3), Fraction(10**6)):
            iv = sqrt_bracket(q, 96)
            val = mpmath.sqrt(mpmath.mpf(q.numerator) / q.denominator)
            assert iv.lo <= Fraction(str(val)) <= iv.hi

    def test_zero(self):
        iv = sqrt_bracket(Fraction(0))
        assert iv.lo == 0 and iv.hi == 0

    def test_negative_rejected(self):
        with pytest.raises(ContractError):
            sqrt_bracket(Fraction(-1))


class TestExpBracket:
    @given(st.fractions(min_value=-20, max_value=4))
    def test_against_mpmath(self, x):
        mpmath.mp.dps = 60
        iv = exp_bracket(x, 96)
        val = mpmath.exp(mpmath.mpf(x.numerator) / x.denominator)
        assert iv.lo <= Fraction(str(val)) <= iv.hi
        assert iv.lo > 0

    def test_zero_is_one(self):
        iv = exp_bracket(Fraction(0))
        assert Fraction(1) in iv
        assert iv.width <= Fraction(1, 2**64)

    def test_monotone_brackets(self):
        lo = exp_bracket(Fraction(-2))
        hi = exp_bracket(Fraction(-1))
        assert certainly_lt(lo, hi)

    def test_functional_equation(self):
        # exp(a) * exp(b) and exp(a + b) must overlap
        a, b = Fraction(3, 7), Fraction(-5, 3)
        prod = exp_bracket(a) * exp_bracket(b)
        direct = exp_bracket(a + b)
        assert prod.lo <= direct.hi and direct.lo <= prod.hi
