"""Fixed-plus-random block matrices and their column-subset events.

A spec stacks T deterministic rows over n rows of independent discrete
entries.  Validity demands a nonzero T x T permanent minor in the last T
fixed columns (a column permutation can always arrange this, and the
top-level events rely on it) and a declared bound p on every entry's max
point probability.

The events E_z(s, alpha) count how many size-s column subsets I keep
per(A[-I]) away from z; the two conditional bounds checked here say the
next revealed row rarely collapses all those permanents to one value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .constants import easy_fp_bound
from .dists import FiniteDist, fmt_frac, max_point_prob
from .errors import CapExceededError, ContractError
from .inequalities import InequalityReport
from .matrices import ColumnSet, IntMatrix, complement_submatrix, per_ryser
from .rng import substream

SUBSET_CAP = 10**6
ENUM_CAP = 10**6


@dataclass(frozen=True)
class StructuredMatrixSpec:
    """T fixed rows over n random rows, all of width n + T.

    ``entry_dists`` is an n x (n+T) grid of integer-valued distributions;
    each must have max point probability at most the declared ``p``.
    """

    t: int
    n: int
    p: Fraction
    fixed: IntMatrix
    entry_dists: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.t < 0 or self.n < 1:
            raise ContractError(f"need T >= 0 and n >= 1, got T={self.t}, n={self.n}")
        if not 0 < self.p < 1:
            raise ContractError(f"need 0 < p < 1, got p={fmt_frac(self.p)}")
        side = self.n + self.t
        if self.fixed.rows != self.t or self.fixed.cols != side:
            raise ContractError(
                f"fixed block must be {self.t} x {side},"
                f" got {self.fixed.rows} x {self.fixed.cols}"
            )
        grid = tuple(tuple(row) for row in self.entry_dists)
        if len(grid) != self.n or any(len(row) != side for row in grid):
            raise ContractError(f"entry grid must be {self.n} x {side}")
        for i, row in enumerate(grid, start=1):
            for j, dist in enumerate(row, start=1):
                if not isinstance(dist, FiniteDist):
                    raise ContractError(f"entry ({i},{j}) is not a distribution")
                if not dist.integer_valued:
                    raise ContractError(f"entry ({i},{j}) has non-integer support")
                q = max_point_prob(dist)
                if q > self.p:
                    raise ContractError(
                        f"entry ({i},{j}) has max point probability"
                        f" {fmt_frac(q)} > declared p = {fmt_frac(self.p)}"
                    )
        object.__setattr__(self, "entry_dists", grid)
        if self.t > 0:
            self._check_fixed_minor()

    def _check_fixed_minor(self):
        side = self.n + self.t
        last = tuple(range(self.n + 1, side + 1))
        if self._minor_per(last) != 0:
            return
        for cols in combinations(range(1, side + 1), self.t):
            if cols != last and self._minor_per(cols) != 0:
                raise ContractError(
                    "the minor in the last T fixed columns has permanent 0;"
                    f" permute columns to move the nonzero minor at {cols}"
                    " into the last T positions"
                )
        raise ContractError(
            "no T x T submatrix of the fixed block has nonzero permanent"
        )

    def _minor_per(self, cols) -> int:
        minor = IntMatrix.from_rows(
            [tuple(self.fixed.entry(r, c) for c in cols) for r in range(1, self.t + 1)]
        )
        return per_ryser(minor)

    @property
    def side(self) -> int:
        return self.n + self.t


def iid_spec(n: int, dist: FiniteDist, fixed: Optional[IntMatrix] = None,
             p=None) -> StructuredMatrixSpec:
    """Spec with every random entry drawn from the same distribution."""
    t = fixed.rows if fixed is not None else 0
    if fixed is None:
        fixed = IntMatrix(0, n, ())
    if p is None:
        p = max_point_prob(dist)
    grid = tuple(tuple(dist for _ in range(n + t)) for _ in range(n))
    return StructuredMatrixSpec(t, n, Fraction(p), fixed, grid)


def sample_random_rows(
    spec: StructuredMatrixSpec, gen: np.random.Generator, count: int
) -> np.ndarray:
    """Draw ``count`` outcomes of the random block, shape (count, n, n+T)."""
    out = np.empty((count, spec.n, spec.side), dtype=np.int64)
    for i, row in enumerate(spec.entry_dists):
        for j, dist in enumerate(row):
            out[:, i, j] = dist.sample_values(gen, count)
    return out


def assemble(spec: StructuredMatrixSpec, random_rows: np.ndarray) -> IntMatrix:
    """Stack the fixed block over one sampled random block."""
    rows = np.asarray(random_rows)
    if rows.shape != (spec.n, spec.side):
        raise ContractError(f"random block must be {spec.n} x {spec.side}")
    if spec.t:
        rows = np.vstack([spec.fixed.to_array(), rows])
    return IntMatrix.from_array(rows)


def sample_structured(spec: StructuredMatrixSpec, seed: int) -> IntMatrix:
    """One realization, fixed rows first; identical for identical seeds."""
    gen = substream(seed, 0)
    return assemble(spec, sample_random_rows(spec, gen, 1)[0])


def event_E(
    A: IntMatrix,
    spec: StructuredMatrixSpec,
    z: int = 0,
    s: int = 0,
    alpha=Fraction(0),
    cap: int = SUBSET_CAP,
) -> bool:
    """More than alpha*C(n,s) size-s subsets I of the first n columns
    have per(A[-I]) != z, evaluated on the first n+T-s rows of A."""
    alpha = Fraction(alpha)
    n = spec.n
    if A.rows < spec.side - s or A.cols != spec.side:
        raise ContractError(
            f"need a matrix with {spec.side} columns and at least"
            f" {spec.side - s} rows"
        )
    if not 0 <= s <= n:
        raise ContractError(f"need 0 <= s <= n, got s={s}")
    if not 0 <= alpha < 1:
        raise ContractError(f"need 0 <= alpha < 1, got {fmt_frac(alpha)}")
    total = math.comb(n, s)
    if total > cap:
        raise CapExceededError(f"C({n},{s}) = {total} exceeds cap {cap}")
    hits = 0
    for members in combinations(range(1, n + 1), s):
        sub = complement_submatrix(A, ColumnSet(spec.side, members))
        if per_ryser(sub) != z:
            hits += 1
    return hits > alpha * total


def _row_outcomes(dists: Sequence[FiniteDist]) -> list:
    """All (values, probability) outcomes of one row of the random block."""
    outcomes = [((), Fraction(1))]
    for dist in dists:
        outcomes = [
            (vals + (int(v),), pr * q)
            for vals, pr in outcomes
            for v, q in dist.atoms
        ]
    return outcomes


def _prefix_space(spec: StructuredMatrixSpec, rows: int, cap: int) -> list:
    """All weighted outcomes of the first ``rows`` random rows."""
    space = [((), Fraction(1))]
    for i in range(rows):
        row_out = _row_outcomes(spec.entry_dists[i])
        if len(space) * len(row_out) > cap:
            raise CapExceededError(
                f"row-space enumeration exceeds cap {cap}"
            )
        space = [
            (stack + (vals,), pr * q) for stack, pr in space for vals, q in row_out
        ]
    return space


def _prefix_matrix(spec: StructuredMatrixSpec, stacked) -> IntMatrix:
    rows = [tuple(r) for r in spec.fixed.to_array().tolist()] if spec.t else []
    rows += [tuple(v) for v in stacked]
    if not rows:
        return IntMatrix(0, spec.side, ())
    return IntMatrix.from_rows(rows)


def _extend(prefix: IntMatrix, values) -> IntMatrix:
    return IntMatrix(
        prefix.rows + 1, prefix.cols, prefix.entries + tuple(values)
    )


def _all_equal_z(prefix: IntMatrix, spec: StructuredMatrixSpec, z: int, size: int) -> bool:
    """True when per(A[-I]) = z for every size-``size`` subset I."""
    for members in combinations(range(1, spec.n + 1), size):
        sub = complement_submatrix(prefix, ColumnSet(spec.side, members))
        if per_ryser(sub) != z:
            return False
    return True


def check_easy_bound(
    spec: StructuredMatrixSpec,
    s: int,
    z: int = 0,
    mode: str = "exact",
    budget: int = ENUM_CAP,
    seed: int = 0,
) -> InequalityReport:
    """Conditional on any prefix where some size-s minor is nonzero, the
    next row leaves all size-(s-1) permanents equal to z with probability
    at most p^s.

    Exact mode enumerates every outcome of the first n-s random rows; mc
    mode samples ``budget`` prefixes.  Either way the conditional
    probability over the next row is computed exactly.
    """
    n = spec.n
    if not 1 <= s <= n:
        raise ContractError(f"need 1 <= s <= n, got s={s}")
    rhs = spec.p**s
    inner = _row_outcomes(spec.entry_dists[n - s])
    worst = Fraction(0)
    qualifying = 0
    if mode == "exact":
        space = _prefix_space(spec, n - s, max(budget // max(len(inner), 1), 1))
        prefixes = [_prefix_matrix(spec, stack) for stack, _ in space]
    elif mode == "mc":
        gen = substream(seed, 0)
        draws = np.empty((budget, n - s, spec.side), dtype=np.int64)
        for i in range(n - s):
            for j in range(spec.side):
                draws[:, i, j] = spec.entry_dists[i][j].sample_values(gen, budget)
        prefixes = [_prefix_matrix(spec, d.tolist()) for d in draws]
    else:
        raise ContractError(f"mode must be 'exact' or 'mc', got {mode!r}")
    for prefix in prefixes:
        if not event_E(prefix, spec, 0, s):
            continue
        qualifying += 1
        bad = sum(
            (q for vals, q in inner if _all_equal_z(_extend(prefix, vals), spec, z, s - 1)),
            Fraction(0),
        )
        worst = max(worst, bad)
    holds = worst <= rhs
    witness = (
        f"mode={mode} n={n} T={spec.t} s={s} z={z}"
        f" prefixes={len(prefixes)} qualifying={qualifying}"
    )
    return InequalityReport(
        "easy-bound", lhs=worst, rhs=rhs, holds=holds, witness=witness
    )


def check_markov_bound(
    spec: StructuredMatrixSpec,
    s: int,
    alpha,
    f_table=None,
    budget: int = ENUM_CAP,
) -> InequalityReport:
    """Pr[not E(s, alpha)] is at most f(n-s)/(1-alpha), exactly.

    ``f_table`` may supply upper bounds on f at each size; by default the
    partial-product bound 1 - prod(1-p^j) is used, which only enlarges the
    right hand side.
    """
    alpha = Fraction(alpha)
    n = spec.n
    if not 1 <= s <= n:
        raise ContractError(f"need 1 <= s <= n, got s={s}")
    if not 0 <= alpha < 1:
        raise ContractError(f"need 0 <= alpha < 1, got {fmt_frac(alpha)}")
    if f_table is not None and (n - s) in f_table:
        f_bound = Fraction(f_table[n - s])
    else:
        f_bound = easy_fp_bound(spec.p, n - s)
    space = _prefix_space(spec, n - s, budget)
    prob_bad = sum(
        (
            pr
            for stack, pr in space
            if not event_E(_prefix_matrix(spec, stack), spec, 0, s, alpha)
        ),
        Fraction(0),
    )
    rhs = f_bound / (1 - alpha)
    witness = (
        f"n={n} T={spec.t} s={s} alpha={fmt_frac(alpha)}"
        f" outcomes={len(space)} f({n - s})<={fmt_frac(f_bound)}"
    )
    return InequalityReport(
        "markov-bound", lhs=prob_bad, rhs=rhs, holds=prob_bad <= rhs, witness=witness
    )


def thin_matrix(
    A: IntMatrix,
    jstar: ColumnSet,
    k_set: ColumnSet,
    xi_prime: Sequence[int],
    t: int = 0,
):
    """Subtract a fresh copy on K in the expansion row, zero elsewhere.

    Starting from A[-J*], the last row (row n+T-s+1 of A, the one the
    minor expansion walks along) becomes xi_i - xi_i' on columns in K and
    0 elsewhere; the second returned matrix moves that row up to position
    T+1, which leaves the permanent unchanged.  Returns (Astar, Aprime).
    """
    side = A.rows
    if A.cols != side:
        raise ContractError("need a square ambient matrix")
    n = side - t
    if t < 0 or n < 1:
        raise ContractError(f"need 0 <= T < side, got T={t}")
    if jstar.universe != side or k_set.universe != side:
        raise ContractError(f"column sets must live in universe {side}")
    if any(i > n for i in jstar.members):
        raise ContractError("J* must be a subset of the first n columns")
    if any(i > n or i in jstar for i in k_set.members):
        raise ContractError("K must be a subset of the first n columns outside J*")
    if len(xi_prime) != side:
        raise ContractError(f"replacement row must have {side} entries")
    s = len(jstar.members) + 1
    row_idx = side - s + 1
    base = complement_submatrix(A, jstar)
    keep = jstar.complement().members
    new_last = tuple(
        A.entry(row_idx, i) - int(xi_prime[i - 1]) if i in k_set else 0
        for i in keep
    )
    assert all(v == 0 for i, v in zip(keep, new_last) if i > n), "fixed columns must zero out"
    astar = IntMatrix(
        base.rows, base.cols, base.entries[: -base.cols] + new_last
    )
    order = list(range(1, t + 1)) + [base.rows] + list(range(t + 1, base.rows))
    aprime = astar.permute_rows(order)
    assert per_ryser(astar) == per_ryser(aprime), "row moves must preserve the permanent"
    return astar, aprime
