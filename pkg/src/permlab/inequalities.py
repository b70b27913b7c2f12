"""Exact checks for anticoncentration inequalities of weighted sums.

Everything runs over exact rational arithmetic.  Checks whose right hand
side hides an unspecified absolute constant never pass or fail; they
record the measured constant instead (exactly, via its square).  Seeded
batteries aggregate many instances with a reproducible generator per
instance and report the supremum of the measured constants.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from .brackets import sqrt_bracket
from .dists import (
    FiniteDist,
    ThinningSpec,
    collision_prob,
    convolve,
    convolve_all,
    fmt_frac,
    fmt_value,
    max_point_prob,
    star_zero_prob,
)
from .errors import ContractError
from .parallel import run_chunks
from .rng import substream

OUTCOME_CHECKED = "checked"
OUTCOME_REJECTED = "precondition-failed"

_CONST_PREC = 64
_BATTERY_CHUNK = 64


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of a single inequality check.

    Exact comparisons set ``rhs`` and ``holds``.  Measured-constant checks
    leave ``holds`` as ``None`` and record the constant twice: the exact
    rational ``constant_sq`` (its square) and a rational approximation
    ``constant`` of the square root.  Inputs rejected by a statement's own
    hypothesis get ``outcome`` = ``precondition-failed``.
    """

    name: str
    lhs: Fraction
    rhs: Optional[Fraction] = None
    holds: Optional[bool] = None
    constant: Optional[Fraction] = None
    constant_sq: Optional[Fraction] = None
    witness: str = ""
    outcome: str = OUTCOME_CHECKED


def report_to_json(report: InequalityReport) -> dict:
    out: dict = {"name": report.name, "lhs": fmt_frac(report.lhs)}
    if report.rhs is not None:
        out["rhs"] = fmt_frac(report.rhs)
    if report.holds is not None:
        out["holds"] = report.holds
    if report.constant is not None:
        out["constant"] = fmt_frac(report.constant)
    if report.constant_sq is not None:
        out["constant_sq"] = fmt_frac(report.constant_sq)
    out["witness"] = report.witness
    out["outcome"] = report.outcome
    return out


def _dist_label(d: FiniteDist) -> str:
    return "{" + ",".join(f"{fmt_value(v)}:{fmt_frac(p)}" for v, p in d.atoms) + "}"


def _approx_sqrt(q: Fraction) -> Fraction:
    return sqrt_bracket(q, _CONST_PREC).midpoint


def check_monotonicity(dist_x: FiniteDist, dist_y: FiniteDist) -> InequalityReport:
    """Adding independent noise never raises the max point probability.

    Verifies Q[X+Y] <= Q[X] exactly.
    """
    lhs = max_point_prob(convolve(dist_x, dist_y))
    rhs = max_point_prob(dist_x)
    witness = f"X={_dist_label(dist_x)} Y={_dist_label(dist_y)}"
    return InequalityReport(
        "monotonicity", lhs=lhs, rhs=rhs, holds=lhs <= rhs, witness=witness
    )


def check_duplication(dist1: FiniteDist, dist2: FiniteDist) -> InequalityReport:
    """Q[X1+X2] is at most the geometric mean of the collision probabilities.

    Compared in squared form, Q[X1+X2]^2 <= Pr[X1=X1'] * Pr[X2=X2'], to stay
    inside exact rationals.
    """
    q = max_point_prob(convolve(dist1, dist2))
    rhs = collision_prob(dist1) * collision_prob(dist2)
    witness = f"squared form; X1={_dist_label(dist1)} X2={_dist_label(dist2)}"
    return InequalityReport(
        "duplication", lhs=q * q, rhs=rhs, holds=q * q <= rhs, witness=witness
    )


def kesten_ratio(dists: Sequence[FiniteDist], p) -> InequalityReport:
    """Measured constant in Q[X_1+...+X_m] <= C * p / sqrt((1-p)m).

    Every summand must satisfy Q[X_i] <= p; that is a caller contract, not
    part of the inequality, so violations raise.  The constant's square
    Q^2 (1-p) m / p^2 is exact.
    """
    p = Fraction(p)
    if not dists:
        raise ContractError("need at least one summand")
    if not 0 < p < 1:
        raise ContractError(f"need 0 < p < 1, got {fmt_frac(p)}")
    for pos, d in enumerate(dists, start=1):
        qi = max_point_prob(d)
        if qi > p:
            raise ContractError(
                f"summand {pos} has max point probability {fmt_frac(qi)} > {fmt_frac(p)}"
            )
    m = len(dists)
    q = max_point_prob(convolve_all(dists))
    constant_sq = q * q * (1 - p) * m / (p * p)
    witness = f"m={m} p={fmt_frac(p)} Q={fmt_frac(q)} shape=p/sqrt((1-p)m)"
    return InequalityReport(
        "kesten-ratio",
        lhs=q,
        constant=_approx_sqrt(constant_sq),
        constant_sq=constant_sq,
        witness=witness,
    )


def check_relative_halasz(spec: ThinningSpec) -> InequalityReport:
    """Measured constant comparing Q of the full sum to the thinned shape.

    The statement needs k < n/4 and Pr[X_K*=0] < 1 - 4k/n; inputs outside
    that hypothesis are a rejected outcome, not an error.  On accepted
    inputs the constant's square Q^2 (n/k) ((1-z0)/z0)^2 is exact, where
    z0 = Pr[X_K*=0].
    """
    n, k = spec.n, spec.k
    label = f"n={n} k={k} dists=[{','.join(_dist_label(d) for d in spec.dists)}]"
    if 4 * k >= n:
        return InequalityReport(
            "relative-halasz",
            lhs=Fraction(0),
            witness=f"{label} needs k < n/4",
            outcome=OUTCOME_REJECTED,
        )
    star0 = star_zero_prob(spec)
    thresh = 1 - Fraction(4 * k, n)
    if star0 >= thresh:
        return InequalityReport(
            "relative-halasz",
            lhs=star0,
            rhs=thresh,
            witness=f"{label} needs Pr[X_K*=0] < 1-4k/n = {fmt_frac(thresh)}",
            outcome=OUTCOME_REJECTED,
        )
    q = max_point_prob(convolve_all(spec.dists))
    ratio = star0 / (1 - star0)
    constant_sq = q * q * Fraction(n, k) / (ratio * ratio)
    witness = (
        f"{label} Pr[X_K*=0]={fmt_frac(star0)} Q={fmt_frac(q)}"
        " shape=sqrt(k/n)*z0/(1-z0)"
    )
    return InequalityReport(
        "relative-halasz",
        lhs=q,
        constant=_approx_sqrt(constant_sq),
        constant_sq=constant_sq,
        witness=witness,
    )


def check_relative_assumption(spec: ThinningSpec, gamma, p) -> InequalityReport:
    """Many low-Q summands keep the thinned sum away from being frozen at 0.

    Under 2/gamma <= k < (1-p)n/8 with at least gamma*n summands of
    Q[X_i] <= p, checks exactly that Pr[X_K*=0] <= (1+p)/2 and that
    (1+p)/2 < 1 - 4k/n.  Hypothesis violations are a rejected outcome.
    """
    gamma, p = Fraction(gamma), Fraction(p)
    if not 0 < gamma <= 1:
        raise ContractError(f"need 0 < gamma <= 1, got {fmt_frac(gamma)}")
    if not 0 < p < 1:
        raise ContractError(f"need 0 < p < 1, got {fmt_frac(p)}")
    n, k = spec.n, spec.k
    low = sum(1 for d in spec.dists if max_point_prob(d) <= p)
    label = f"n={n} k={k} gamma={fmt_frac(gamma)} p={fmt_frac(p)} low_q={low}"
    missing = []
    if gamma * k < 2:
        missing.append("2/gamma <= k")
    if 8 * k >= (1 - p) * n:
        missing.append("k < (1-p)n/8")
    if low < gamma * n:
        missing.append("gamma*n low-Q summands")
    if missing:
        return InequalityReport(
            "relative-assumption",
            lhs=Fraction(0),
            witness=f"{label} needs {', '.join(missing)}",
            outcome=OUTCOME_REJECTED,
        )
    star0 = star_zero_prob(spec)
    bound = (1 + p) / 2
    thresh = 1 - Fraction(4 * k, n)
    holds = star0 <= bound and bound < thresh
    witness = (
        f"{label} Pr[X_K*=0]={fmt_frac(star0)} <= (1+p)/2"
        f" and (1+p)/2 < 1-4k/n = {fmt_frac(thresh)}"
    )
    return InequalityReport(
        "relative-assumption", lhs=star0, rhs=bound, holds=holds, witness=witness
    )


@dataclass(frozen=True)
class SetFamily:
    """A collection of size-s subsets of {1, ..., n}, kept sorted."""

    n: int
    s: int
    members: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ContractError(f"need n >= 1, got {self.n}")
        if not 1 <= self.s <= self.n:
            raise ContractError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")
        seen = set()
        for member in self.members:
            member = tuple(sorted(int(i) for i in member))
            if len(member) != self.s or len(set(member)) != self.s:
                raise ContractError(f"member {member} is not a size-{self.s} set")
            if not all(1 <= i <= self.n for i in member):
                raise ContractError(f"member {member} leaves {{1,...,{self.n}}}")
            seen.add(member)
        object.__setattr__(self, "members", tuple(sorted(seen)))

    def __len__(self) -> int:
        return len(self.members)


def heavy_pairs(family: SetFamily, alpha) -> frozenset:
    """All pairs (I, G) where G is a popular size-(s-1) subset of I in F.

    G is popular when more than (alpha/2)(n-s+1) members of the family
    contain it.  Requires |F| >= alpha*C(n,s); the guaranteed lower bound
    |H| >= (alpha/2) s C(n,s) is asserted on the result.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise ContractError(f"need 0 < alpha <= 1, got {fmt_frac(alpha)}")
    n, s = family.n, family.s
    total = math.comb(n, s)
    if len(family) < alpha * total:
        raise ContractError(
            f"family has {len(family)} members, needs at least"
            f" alpha*C({n},{s}) = {fmt_frac(alpha * total)}"
        )
    degree: Counter = Counter()
    for member in family.members:
        for g in combinations(member, s - 1):
            degree[g] += 1
    cutoff = alpha * (n - s + 1) / 2
    pairs = frozenset(
        (member, g)
        for member in family.members
        for g in combinations(member, s - 1)
        if degree[g] > cutoff
    )
    assert len(pairs) >= alpha * s * total / 2, "popular-pair count below guarantee"
    return pairs


def heavy_pairs_bound(family: SetFamily, alpha) -> Fraction:
    """The guaranteed lower bound (alpha/2) s C(n, s) on the pair count."""
    return Fraction(alpha) * family.s * math.comb(family.n, family.s) / 2


def random_rational_dist(
    gen: np.random.Generator,
    *,
    min_atoms: int = 1,
    max_atoms: int = 4,
    lo: int = -3,
    hi: int = 3,
    denom: int = 16,
) -> FiniteDist:
    """Draw a distribution with denominator-``denom`` rational weights."""
    span = hi - lo + 1
    if not 1 <= min_atoms <= max_atoms <= min(span, denom):
        raise ContractError("atom count range does not fit the value range")
    natoms = int(gen.integers(min_atoms, max_atoms + 1))
    values = np.sort(gen.choice(span, size=natoms, replace=False)) + lo
    if natoms == 1:
        return FiniteDist.point_mass(int(values[0]))
    cuts = np.sort(gen.choice(denom - 1, size=natoms - 1, replace=False)) + 1
    bounds = [0, *cuts.tolist(), denom]
    return FiniteDist.from_pairs(
        (int(v), Fraction(bounds[i + 1] - bounds[i], denom))
        for i, v in enumerate(values.tolist())
    )


def random_dist_with_q(
    gen: np.random.Generator, p, *, tries: int = 256, **kwargs
) -> FiniteDist:
    """Draw a distribution whose max point probability is at most p."""
    p = Fraction(p)
    kwargs.setdefault("min_atoms", 2)
    for _ in range(tries):
        d = random_rational_dist(gen, **kwargs)
        if max_point_prob(d) <= p:
            return d
    if p >= Fraction(1, 2):
        return FiniteDist.rademacher()
    raise ContractError(f"no draw reached max point probability <= {fmt_frac(p)}")


def random_set_family(
    gen: np.random.Generator, n: int, s: int, min_size: int
) -> SetFamily:
    """Draw a family of at least min_size distinct size-s subsets."""
    pool = list(combinations(range(1, n + 1), s))
    if not 0 <= min_size <= len(pool):
        raise ContractError(f"min_size {min_size} outside 0..C({n},{s})")
    size = int(gen.integers(min_size, len(pool) + 1))
    idx = gen.choice(len(pool), size=size, replace=False)
    return SetFamily(n, s, tuple(pool[i] for i in sorted(idx.tolist())))


@dataclass(frozen=True)
class BatteryReport:
    """Aggregated outcome of a seeded battery of inequality checks."""

    name: str
    count: int
    seed: int
    reports: tuple

    @property
    def checked(self) -> int:
        return sum(1 for r in self.reports if r.outcome == OUTCOME_CHECKED)

    @property
    def rejected(self) -> int:
        return sum(1 for r in self.reports if r.outcome == OUTCOME_REJECTED)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.reports if r.holds is False)

    def sup_constant(self) -> Optional[InequalityReport]:
        """The report with the largest measured constant, by exact square."""
        best = None
        for r in self.reports:
            if r.constant_sq is None:
                continue
            if best is None or r.constant_sq > best.constant_sq:
                best = r
        return best


def battery_to_json(battery: BatteryReport) -> dict:
    out: dict = {
        "name": battery.name,
        "count": battery.count,
        "seed": battery.seed,
        "checked": battery.checked,
        "rejected": battery.rejected,
        "failures": battery.failures,
    }
    best = battery.sup_constant()
    if best is not None:
        out["sup_constant"] = fmt_frac(best.constant)
        out["sup_constant_sq"] = fmt_frac(best.constant_sq)
        out["sup_witness"] = best.witness
    out["reports"] = [report_to_json(r) for r in battery.reports]
    return out


def _run_battery(
    name: str,
    count: int,
    seed: int,
    make_report: Callable[[np.random.Generator, int], InequalityReport],
    workers: int = 1,
) -> BatteryReport:
    """Run one seeded check per instance index; chunk layout is fixed so
    results do not depend on the worker count."""
    if count < 1:
        raise ContractError(f"need a positive instance count, got {count}")

    def chunk(start: int, stop: int, idx: int) -> list:
        return [make_report(substream(seed, i), i) for i in range(start, stop)]

    reports: list = []
    for part in run_chunks(count, chunk, workers=workers, chunk=_BATTERY_CHUNK):
        reports.extend(part)
    return BatteryReport(name, count, seed, tuple(reports))


def monotonicity_battery(count: int, seed: int = 0, workers: int = 1) -> BatteryReport:
    def make(gen, _i):
        return check_monotonicity(random_rational_dist(gen), random_rational_dist(gen))

    return _run_battery("monotonicity", count, seed, make, workers)


def duplication_battery(count: int, seed: int = 0, workers: int = 1) -> BatteryReport:
    def make(gen, _i):
        return check_duplication(random_rational_dist(gen), random_rational_dist(gen))

    return _run_battery("duplication", count, seed, make, workers)


def kesten_rademacher_battery(
    ms: Sequence[int] = tuple(range(2, 21)), p=Fraction(1, 2)
) -> BatteryReport:
    """Sign-sum instances X_i uniform on {-1,1} for each requested m."""
    reports = tuple(kesten_ratio([FiniteDist.rademacher()] * m, p) for m in ms)
    return BatteryReport("kesten-rademacher", len(reports), 0, reports)


def kesten_battery(
    count: int, seed: int = 0, workers: int = 1, p=Fraction(1, 2), max_m: int = 8
) -> BatteryReport:
    p = Fraction(p)

    def make(gen, _i):
        m = int(gen.integers(1, max_m + 1))
        return kesten_ratio([random_dist_with_q(gen, p) for _ in range(m)], p)

    return _run_battery("kesten-ratio", count, seed, make, workers)


def halasz_battery(
    count: int, seed: int = 0, workers: int = 1, max_n: int = 10
) -> BatteryReport:
    """Thinning instances with k=1, n in 9..max_n, and low-Q summands.

    Q[X_i] <= 1/2 caps every collision probability at 1/2, hence
    Pr[X_K*=0] <= 1/2 < 1 - 4/n once n >= 9, so every instance lands
    strictly inside the statement's hypothesis.
    """
    if max_n < 9:
        raise ContractError("need max_n >= 9 to guarantee the hypothesis")
    half = Fraction(1, 2)

    def make(gen, _i):
        n = int(gen.integers(9, max_n + 1))
        dists = tuple(random_dist_with_q(gen, half) for _ in range(n))
        return check_relative_halasz(ThinningSpec(n, 1, dists))

    return _run_battery("relative-halasz", count, seed, make, workers)


def assumption_battery(
    count: int,
    seed: int = 0,
    workers: int = 1,
    n_range=(33, 44),
    k: int = 2,
    gamma=Fraction(1),
    p=Fraction(1, 2),
    pool_size: int = 3,
) -> BatteryReport:
    """Low-Q summands drawn from a small per-instance pool.

    Defaults satisfy the hypothesis chain 2/gamma <= k < (1-p)n/8 for every
    n in n_range.  A small pool keeps the number of distinct summand types
    low, which keeps the exact subset-sum average cheap at these n.
    """
    gamma, p = Fraction(gamma), Fraction(p)

    def make(gen, _i):
        n = int(gen.integers(n_range[0], n_range[1] + 1))
        pool = [random_dist_with_q(gen, p) for _ in range(pool_size)]
        picks = gen.integers(0, pool_size, size=n)
        dists = tuple(pool[j] for j in picks.tolist())
        return check_relative_assumption(ThinningSpec(n, k, dists), gamma, p)

    return _run_battery("relative-assumption", count, seed, make, workers)


def heavy_pairs_battery(
    count: int, seed: int = 0, workers: int = 1, max_n: int = 7
) -> BatteryReport:
    def make(gen, _i):
        n = int(gen.integers(3, max_n + 1))
        s = int(gen.integers(1, n + 1))
        alpha = Fraction(int(gen.integers(1, 5)), 4)
        family = random_set_family(gen, n, s, math.ceil(alpha * math.comb(n, s)))
        pairs = heavy_pairs(family, alpha)
        bound = heavy_pairs_bound(family, alpha)
        witness = (
            f"n={n} s={s} alpha={fmt_frac(alpha)} |F|={len(family)} |H|={len(pairs)}"
        )
        return InequalityReport(
            "heavy-pairs",
            lhs=bound,
            rhs=Fraction(len(pairs)),
            holds=bound <= len(pairs),
            witness=witness,
        )

    return _run_battery("heavy-pairs", count, seed, make, workers)
