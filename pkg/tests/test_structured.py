import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import brute_per
from permlab.dists import FiniteDist
from permlab.errors import CapExceededError, ContractError
from permlab.matrices import ColumnSet, IntMatrix, per_ryser
from permlab.structured import (
    StructuredMatrixSpec,
    check_easy_bound,
    check_markov_bound,
    event_E,
    iid_spec,
    sample_structured,
    thin_matrix,
)

R = FiniteDist.rademacher()
COIN = FiniteDist.uniform([0, 1])


def coin_spec(n, t=0):
    fixed = None
    if t == 1:
        fixed = IntMatrix.from_rows([[0] * n + [1]])
    return iid_spec(n, COIN, fixed=fixed)


class TestSpecValidation:
    def test_plain_spec(self):
        spec = iid_spec(3, R)
        assert spec.t == 0 and spec.n == 3 and spec.side == 3
        assert spec.p == Fraction(1, 2)

    def test_fixed_rows_need_nonzero_tail_minor(self):
        good = StructuredMatrixSpec(
            1,
            2,
            Fraction(1, 2),
            IntMatrix.from_rows([[0, 0, 1]]),
            ((R, R, R), (R, R, R)),
        )
        assert good.side == 3

    def test_movable_minor_gets_permute_hint(self):
        with pytest.raises(ContractError) as err:
            StructuredMatrixSpec(
                1,
                2,
                Fraction(1, 2),
                IntMatrix.from_rows([[1, 0, 0]]),
                ((R, R, R), (R, R, R)),
            )
        assert "permute columns" in str(err.value)

    def test_no_minor_anywhere(self):
        with pytest.raises(ContractError) as err:
            StructuredMatrixSpec(
                1,
                2,
                Fraction(1, 2),
                IntMatrix.from_rows([[0, 0, 0]]),
                ((R, R, R), (R, R, R)),
            )
        assert "nonzero permanent" in str(err.value)

    def test_entry_laws_must_be_integer_valued(self):
        half = FiniteDist.from_pairs(
            [(Fraction(1, 2), Fraction(1, 2)), (1, Fraction(1, 2))]
        )
        with pytest.raises(ContractError) as err:
            iid_spec(2, half)
        assert "non-integer" in str(err.value)

    def test_q_above_p_rejected(self):
        lazy = FiniteDist.from_pairs([(0, Fraction(3, 4)), (1, Fraction(1, 4))])
        with pytest.raises(ContractError):
            iid_spec(2, lazy, p=Fraction(1, 2))

    def test_p_defaults_to_max_point_probability(self):
        skew = FiniteDist.from_pairs([(0, Fraction(1, 4)), (1, Fraction(3, 4))])
        assert iid_spec(2, skew).p == Fraction(3, 4)


class TestSampling:
    def test_shape_and_support(self):
        spec = coin_spec(3, t=1)
        mat = sample_structured(spec, seed=2)
        assert (mat.rows, mat.cols) == (4, 4)
        assert mat.row(1) == (0, 0, 0, 1)
        assert set(mat.entries) <= {0, 1}

    def test_deterministic_per_seed(self):
        spec = coin_spec(4)
        assert sample_structured(spec, 7) == sample_structured(spec, 7)
        assert sample_structured(spec, 7) != sample_structured(spec, 8)


class TestEventE:
    def test_matches_direct_minor_enumeration(self):
        spec = iid_spec(3, R)
        for entries in itertools.product((-1, 1), repeat=9):
            rows = [list(entries[i * 3 : (i + 1) * 3]) for i in range(3)]
            mat = IntMatrix.from_rows(rows)
            for s in (1, 2):
                hits = 0
                for drop in itertools.combinations(range(3), s):
                    keep = [j for j in range(3) if j not in drop]
                    sub = [[rows[i][j] for j in keep] for i in range(3 - s)]
                    if brute_per(sub) != 0:
                        hits += 1
                want = hits > 0
                assert event_E(mat, spec, z=0, s=s) == want

    def test_full_drop_is_deterministic(self):
        spec = iid_spec(2, R)
        mat = IntMatrix.from_rows([[1, 1], [1, -1]])
        assert event_E(mat, spec, s=2)
        spec_t = coin_spec(2, t=1)
        mat_t = sample_structured(spec_t, 0)
        assert event_E(mat_t, spec_t, s=2)

    def test_alpha_threshold(self):
        spec = iid_spec(2, COIN)
        mat = IntMatrix.from_rows([[1, 0], [1, 1]])
        # dropping column 2 leaves [[1]], dropping column 1 leaves [[0]]
        assert event_E(mat, spec, s=1, alpha=Fraction(0))
        assert not event_E(mat, spec, s=1, alpha=Fraction(1, 2))
        with pytest.raises(ContractError):
            event_E(mat, spec, s=1, alpha=Fraction(1))

    def test_nonzero_target_value(self):
        spec = iid_spec(2, R)
        ones = IntMatrix.from_rows([[1, 1], [1, 1]])
        # per of each 1 x 1 minor is 1, so no subset differs from z=1
        assert not event_E(ones, spec, z=1, s=1)

    def test_cap(self):
        spec = iid_spec(24, R)
        mat = IntMatrix.from_rows([[1] * 24] * 24)
        with pytest.raises(CapExceededError):
            event_E(mat, spec, s=12, cap=100)


class TestEasyBound:
    def test_tight_at_coin_n2_s2(self):
        rep = check_easy_bound(coin_spec(2), 2)
        assert rep.holds
        assert rep.lhs == Fraction(1, 4)
        assert rep.rhs == Fraction(1, 4)

    def test_tight_at_coin_n2_s1(self):
        rep = check_easy_bound(coin_spec(2), 1)
        assert rep.holds
        assert rep.lhs == Fraction(1, 2) == rep.rhs

    def test_sign_entries_tight_at_s1_slack_at_s2(self):
        # next sign row kills a 2 x 2 permanent half the time, so s=1 is
        # tight; two singleton minors can never both vanish, so s=2 is not
        rep1 = check_easy_bound(iid_spec(2, R), 1)
        assert rep1.holds and rep1.lhs == Fraction(1, 2) == rep1.rhs
        rep2 = check_easy_bound(iid_spec(2, R), 2)
        assert rep2.holds and rep2.lhs == 0 and rep2.rhs == Fraction(1, 4)

    def test_nonzero_z(self):
        for z in (-2, -1, 1, 2):
            rep = check_easy_bound(coin_spec(2), 2, z=z)
            assert rep.holds

    def test_with_fixed_row(self):
        rep = check_easy_bound(coin_spec(2, t=1), 1)
        assert rep.holds

    def test_mc_mode_agrees_on_tiny_space(self):
        exact = check_easy_bound(coin_spec(2), 1)
        mc = check_easy_bound(coin_spec(2), 1, mode="mc", budget=64, seed=3)
        assert mc.holds
        assert mc.lhs <= exact.rhs

    def test_bad_s(self):
        with pytest.raises(ContractError):
            check_easy_bound(coin_spec(2), 3)
        with pytest.raises(ContractError):
            check_easy_bound(coin_spec(2), 0)


class TestMarkovBound:
    def test_holds_across_small_grid(self):
        for n in (1, 2, 3):
            for s in range(1, n + 1):
                for alpha in (Fraction(0), Fraction(1, 2)):
                    rep = check_markov_bound(coin_spec(n), s, alpha)
                    assert rep.holds, rep.witness

    def test_rhs_uses_partial_product_bound(self):
        rep = check_markov_bound(coin_spec(3), 1, Fraction(1, 4))
        from permlab.constants import easy_fp_bound

        assert rep.rhs == easy_fp_bound(Fraction(1, 2), 2) / Fraction(3, 4)

    def test_f_table_override(self):
        rep = check_markov_bound(coin_spec(3), 1, Fraction(0), f_table={2: Fraction(1)})
        assert rep.rhs == 1

    def test_alpha_range(self):
        with pytest.raises(ContractError):
            check_markov_bound(coin_spec(2), 1, Fraction(1))
        with pytest.raises(ContractError):
            check_markov_bound(coin_spec(2), 1, Fraction(-1, 2))


class TestThinMatrix:
    def test_hand_worked_example(self):
        # 3 x 3, J* = {2}, K = {1}, expansion row is row 2
        a = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
        astar, aprime = thin_matrix(
            a, ColumnSet(3, (2,)), ColumnSet(3, (1,)), [10, 0, 0]
        )
        # kept columns are 1 and 3; modified last row: (4 - 10, 0)
        assert astar.rows == astar.cols == 2
        assert astar.row(1) == (1, 3)
        assert astar.row(2) == (-6, 0)
        assert per_ryser(astar) == per_ryser(aprime)

    def test_empty_k_zeroes_the_row(self):
        a = IntMatrix.from_rows([[1, 2], [3, 4]])
        astar, _ = thin_matrix(a, ColumnSet(2, ()), ColumnSet(2, ()), [0, 0])
        assert astar.row(2) == (0, 0)
        assert per_ryser(astar) == 0

    def test_identical_copy_zeroes_the_row(self):
        a = IntMatrix.from_rows([[1, 2], [3, 4]])
        astar, _ = thin_matrix(
            a, ColumnSet(2, ()), ColumnSet(2, (1, 2)), [3, 4]
        )
        assert astar.row(2) == (0, 0)

    def test_row_relocation_with_fixed_rows(self):
        a = IntMatrix.from_rows(
            [[0, 0, 0, 1], [1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12]]
        )
        astar, aprime = thin_matrix(
            a, ColumnSet(4, ()), ColumnSet(4, (1, 2, 3)), [0, 0, 0, 0], t=1
        )
        # the fixed row stays first, the modified row moves to position 2
        assert aprime.row(1) == astar.row(1) == (0, 0, 0, 1)
        assert aprime.row(2) == astar.row(4)
        assert aprime.row(2)[-1] == 0
        assert per_ryser(astar) == per_ryser(aprime)

    def test_k_must_avoid_jstar(self):
        a = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
        with pytest.raises(ContractError):
            thin_matrix(a, ColumnSet(3, (2,)), ColumnSet(3, (2,)), [0, 0, 0])

    def test_xi_prime_length_checked(self):
        a = IntMatrix.from_rows([[1, 2], [3, 4]])
        with pytest.raises(ContractError):
            thin_matrix(a, ColumnSet(2, ()), ColumnSet(2, ()), [0])

    def test_random_instances_preserve_permanent(self, gen):
        for i in range(200):
            t = int(gen.integers(0, 2))
            n = int(gen.integers(2, 6))
            side = n + t
            mat = IntMatrix.from_array(gen.integers(-3, 4, size=(side, side)))
            s = int(gen.integers(1, n + 1))
            perm = [int(v) + 1 for v in gen.permutation(n)]
            jstar = ColumnSet(side, tuple(sorted(perm[: s - 1])))
            rest = sorted(perm[s - 1 :])
            ksz = int(gen.integers(0, len(rest) + 1))
            k_set = ColumnSet(side, tuple(sorted(gen.permutation(rest)[:ksz].tolist())))
            xi = [int(v) for v in gen.integers(-3, 4, size=side)]
            astar, aprime = thin_matrix(mat, jstar, k_set, xi, t=t)
            assert per_ryser(astar) == per_ryser(aprime)
            if t:
                assert aprime.row(t + 1)[-t:] == (0,) * t
