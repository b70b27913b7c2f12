"""Shared fixtures and tiny independent oracles for the test suite."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "permlab",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("permlab")


@pytest.fixture
def gen():
    return np.random.default_rng(20260823)


def brute_per(rows) -> int:
    """Permutation-sum permanent, written independently of the package."""
    n = len(rows)
    if n == 0:
        return 1
    total = 0
    for pi in itertools.permutations(range(n)):
        prod = 1
        for i, j in enumerate(pi):
            prod *= rows[i][j]
        total += prod
    return total


def brute_dist_sum(dists):
    """Exact distribution of a sum of independent finite variables."""
    acc = {Fraction(0): Fraction(1)}
    for d in dists:
        nxt = {}
        for v1, p1 in acc.items():
            for v2, p2 in d:
                nxt[v1 + v2] = nxt.get(v1 + v2, Fraction(0)) + p1 * p2
        acc = nxt
    return acc
