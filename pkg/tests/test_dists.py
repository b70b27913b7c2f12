import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_dist_sum
from permlab.dists import (
    ATOM_CAP,
    FiniteDist,
    ThinningSpec,
    collision_prob,
    convolve,
    convolve_all,
    dist_from_json,
    dist_to_json,
    fmt_frac,
    format_dist,
    hypergeometric_empty_prob,
    max_point_prob,
    parse_dist,
    sample_subset,
    sample_subsets,
    star_zero_prob,
    symmetrize,
)
from permlab.errors import CapExceededError, ContractError, ParseError

fractions_01 = st.fractions(min_value=0, max_value=1)


def small_dists():
    """Random exact distributions with at most four rational atoms."""

    @st.composite
    def build(draw):
        n = draw(st.integers(1, 4))
        values = draw(
            st.lists(
                st.fractions(min_value=-4, max_value=4),
                min_size=n,
                max_size=n,
                unique=True,
            )
        )
        weights = draw(st.lists(st.integers(1, 6), min_size=n, max_size=n))
        total = sum(weights)
        return FiniteDist.from_pairs(
            [(v, Fraction(w, total)) for v, w in zip(values, weights)]
        )

    return build()


class TestFiniteDist:
    def test_atoms_sorted_and_merged(self):
        d = FiniteDist.from_pairs(
            [(1, Fraction(1, 4)), (0, Fraction(1, 2)), (1, Fraction(1, 4))]
        )
        assert d.atoms == ((Fraction(0), Fraction(1, 2)), (Fraction(1), Fraction(1, 2)))

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ContractError):
            FiniteDist.from_pairs([(0, Fraction(1, 2))])
        with pytest.raises(ContractError):
            FiniteDist.from_pairs([(0, Fraction(3, 2)), (1, Fraction(-1, 2))])

    def test_constructors(self):
        assert FiniteDist.point_mass(3).atoms == ((Fraction(3), Fraction(1)),)
        assert FiniteDist.rademacher() == FiniteDist.uniform([-1, 1])
        u = FiniteDist.uniform([2, 0, 1])
        assert u.support == (Fraction(0), Fraction(1), Fraction(2))
        assert u.prob(2) == Fraction(1, 3)
        assert u.prob(9) == 0

    def test_negate(self):
        d = FiniteDist.from_pairs([(0, Fraction(1, 4)), (2, Fraction(3, 4))])
        assert d.negate().atoms == (
            (Fraction(-2), Fraction(3, 4)),
            (Fraction(0), Fraction(1, 4)),
        )

    def test_integer_valued_and_numerators(self):
        d = FiniteDist.from_pairs([(-1, Fraction(1, 4)), (2, Fraction(3, 4))])
        assert d.integer_valued
        assert d.common_denominator() == 4
        assert d.numerators() == [1, 3]
        half = FiniteDist.from_pairs([(Fraction(1, 2), Fraction(1))])
        assert not half.integer_valued

    def test_sampling_is_deterministic_and_supported(self):
        d = FiniteDist.from_pairs([(-1, Fraction(1, 4)), (5, Fraction(3, 4))])
        a = d.sample_values(np.random.default_rng(7), 500)
        b = d.sample_values(np.random.default_rng(7), 500)
        assert np.array_equal(a, b)
        assert set(np.unique(a)) <= {-1, 5}
        # empirical mean within 5 sigma of 7/2
        mean, sigma = 3.5, math.sqrt((27 + 81) / 16 / 500)
        assert abs(a.mean() - mean) < 5 * sigma


class TestFunctionals:
    def test_max_point_prob_and_collision(self):
        d = FiniteDist.from_pairs([(0, Fraction(1, 3)), (1, Fraction(2, 3))])
        assert max_point_prob(d) == Fraction(2, 3)
        assert collision_prob(d) == Fraction(1, 9) + Fraction(4, 9)

    @given(small_dists())
    def test_collision_below_q(self, d):
        # sum p_i^2 <= Q * sum p_i = Q
        assert collision_prob(d) <= max_point_prob(d)

    @given(small_dists(), small_dists())
    def test_convolve_matches_brute_force(self, d1, d2):
        got = convolve(d1, d2)
        want = brute_dist_sum([d1.atoms, d2.atoms])
        assert dict(got.atoms) == want

    @given(small_dists())
    def test_symmetrize_matches_brute_force(self, d):
        got = symmetrize(d)
        want = brute_dist_sum([d.atoms, d.negate().atoms])
        assert dict(got.atoms) == want
        assert got == got.negate()

    def test_convolve_all_empty_is_point_mass_zero(self):
        assert convolve_all([]) == FiniteDist.point_mass(0)

    def test_convolve_cap(self):
        wide = FiniteDist.uniform(range(200))
        with pytest.raises(CapExceededError) as err:
            convolve(wide, wide, cap=100)
        assert err.value.exit_code == 4


class TestThinning:
    def test_spec_validation(self):
        r = FiniteDist.rademacher()
        with pytest.raises(ContractError):
            ThinningSpec(2, 3, (r, r))
        with pytest.raises(ContractError):
            ThinningSpec(2, 1, (r,))

    def test_star_zero_prob_matches_brute_force(self):
        dists = (
            FiniteDist.rademacher(),
            FiniteDist.uniform([0, 1]),
            FiniteDist.from_pairs([(0, Fraction(1, 4)), (2, Fraction(3, 4))]),
            FiniteDist.rademacher(),
        )
        n, k = 4, 2
        spec = ThinningSpec(n, k, dists)
        got = star_zero_prob(spec)
        # brute force: average over subsets of the exact symmetrized sum
        total = Fraction(0)
        import itertools

        subsets = list(itertools.combinations(range(n), k))
        for sub in subsets:
            acc = brute_dist_sum(
                [symmetrize(dists[i]).atoms for i in sub]
            )
            total += acc.get(Fraction(0), Fraction(0))
        assert got == total / len(subsets)

    def test_star_zero_prob_k_equals_n(self):
        r = FiniteDist.rademacher()
        spec = ThinningSpec(2, 2, (r, r))
        sym = convolve_all([symmetrize(r), symmetrize(r)])
        assert star_zero_prob(spec) == sym.prob(0)

    def test_hypergeometric_empty_prob(self):
        # Pr[random 2-subset of {1..5} misses a fixed 2-set] = C(3,2)/C(5,2)
        assert hypergeometric_empty_prob(5, 2, 2) == Fraction(3, 10)
        assert hypergeometric_empty_prob(5, 2, 0) == 1
        assert hypergeometric_empty_prob(4, 4, 1) == 0

    def test_hypergeometric_against_scipy(self):
        from scipy.stats import hypergeom

        for n, k, isize in ((8, 3, 2), (10, 4, 5), (6, 1, 3)):
            exact = hypergeometric_empty_prob(n, k, isize)
            approx = hypergeom.pmf(0, n, isize, k)
            assert abs(float(exact) - approx) < 1e-12


class TestSubsetSampling:
    def test_shapes_sorted_and_in_range(self):
        rows = sample_subsets(10, 3, 50, seed=5)
        assert rows.shape == (50, 3)
        assert (rows >= 1).all() and (rows <= 10).all()
        assert (np.diff(rows, axis=1) > 0).all()

    def test_deterministic(self):
        assert np.array_equal(sample_subsets(9, 4, 20, 1), sample_subsets(9, 4, 20, 1))
        assert not np.array_equal(
            sample_subsets(9, 4, 20, 1), sample_subsets(9, 4, 20, 2)
        )

    def test_edge_sizes(self):
        assert sample_subsets(5, 0, 3, 0).shape == (3, 0)
        assert sample_subsets(4, 4, 2, 0).tolist() == [[1, 2, 3, 4]] * 2

    def test_sample_subset_wrapper(self):
        cs = sample_subset(8, 3, seed=11)
        assert cs.universe == 8
        assert len(cs.members) == 3

    def test_uniformity_chi_square(self):
        # all C(5,2) = 10 subsets should appear roughly equally often
        rows = sample_subsets(5, 2, 4000, seed=3)
        _, counts = np.unique(rows, axis=0, return_counts=True)
        assert len(counts) == 10
        chi2 = (((counts - 400.0) ** 2) / 400.0).sum()
        assert chi2 < 34  # Pr[chi2_9 > 34] < 1e-4


class TestSerialization:
    def test_fmt_frac_always_slashed(self):
        assert fmt_frac(Fraction(1, 2)) == "1/2"
        assert fmt_frac(Fraction(3)) == "3/1"
        assert fmt_frac(Fraction(-1, 4)) == "-1/4"

    def test_parse_format_round_trip(self):
        d = FiniteDist.from_pairs([(-2, Fraction(1, 8)), (1, Fraction(7, 8))])
        assert parse_dist(format_dist(d)) == d

    def test_parse_with_comments_and_unicode_minus(self):
        text = "# entry law\n\u22121 1/2\n1 1/2\n"
        assert parse_dist(text) == FiniteDist.rademacher()

    def test_parse_errors(self):
        for bad in ("", "1\n", "0 1/2\n1 1/3\n", "a 1/2\n0 1/2\n"):
            with pytest.raises(ParseError):
                parse_dist(bad)

    def test_json_round_trip(self):
        d = FiniteDist.from_pairs([(Fraction(-1), Fraction(2, 5)), (3, Fraction(3, 5))])
        assert dist_from_json(dist_to_json(d)) == d
        with pytest.raises(ParseError):
            dist_from_json([{"v": "1"}])

    def test_atom_cap_is_roomy(self):
        assert ATOM_CAP >= 10**6
