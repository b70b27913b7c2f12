"""Exact finite discrete probability.

Distributions carry rational atom probabilities and rational (usually
integer) values; every operation here is exact, so downstream inequality
checks are true comparisons, not tolerance tests.  Sampling is exact as
well: atom frequencies are driven by integer draws against cumulative
numerators over a common denominator, never by float thresholds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError, ContractError, ParseError
from .matrices import ColumnSet
from .rng import draw_uniform_numerators, substream

ATOM_CAP = 10**6
SUBSET_CAP = 10**6
_PAIR_WORK_CAP = 4 * 10**7

ZERO = Fraction(0)
ONE = Fraction(1)


def fmt_frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def fmt_value(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else fmt_frac(v)


@dataclass(frozen=True)
class FiniteDist:
    """Finite distribution: sorted (value, probability) atoms, exact."""

    atoms: tuple

    def __post_init__(self):
        merged = {}
        for v, p in self.atoms:
            v, p = Fraction(v), Fraction(p)
            if p < 0:
                raise ContractError(f"negative probability {p} at value {v}")
            if p > 0:
                merged[v] = merged.get(v, ZERO) + p
        if sum(merged.values(), ZERO) != 1:
            raise ContractError(
                f"probabilities must sum to 1, got {sum(merged.values(), ZERO)}"
            )
        object.__setattr__(
            self, "atoms", tuple((v, merged[v]) for v in sorted(merged))
        )

    @classmethod
    def from_pairs(cls, pairs) -> "FiniteDist":
        if hasattr(pairs, "items"):
            pairs = pairs.items()
        return cls(tuple(pairs))

    @classmethod
    def point_mass(cls, v=0) -> "FiniteDist":
        return cls(((Fraction(v), ONE),))

    @classmethod
    def uniform(cls, values) -> "FiniteDist":
        values = list(values)
        if not values:
            raise ContractError("uniform distribution needs a nonempty support")
        p = Fraction(1, len(values))
        return cls.from_pairs([(v, p) for v in values])

    @classmethod
    def rademacher(cls) -> "FiniteDist":
        return cls.uniform([-1, 1])

    @property
    def support(self) -> tuple:
        return tuple(v for v, _ in self.atoms)

    def prob(self, v) -> Fraction:
        v = Fraction(v)
        for value, p in self.atoms:
            if value == v:
                return p
        return ZERO

    def negate(self) -> "FiniteDist":
        return FiniteDist(tuple((-v, p) for v, p in self.atoms))

    @property
    def integer_valued(self) -> bool:
        return all(v.denominator == 1 for v, _ in self.atoms)

    def common_denominator(self) -> int:
        return math.lcm(*(p.denominator for _, p in self.atoms))

    def numerators(self) -> list:
        d = self.common_denominator()
        return [p.numerator * (d // p.denominator) for _, p in self.atoms]

    def sample_values(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """Exact iid draws as an int64 value array (integer support only)."""
        if not self.integer_valued:
            raise ContractError("sampling to an integer array needs integer values")
        idx = self.sample_indices(gen, size)
        vals = np.array([int(v) for v in self.support], dtype=np.int64)
        return vals[idx]

    def sample_indices(self, gen: np.random.Generator, size: int) -> np.ndarray:
        d = self.common_denominator()
        cum = np.cumsum(np.array(self.numerators(), dtype=np.int64))
        draws = draw_uniform_numerators(gen, d, size)
        return np.searchsorted(cum, draws, side="right")

    def __str__(self) -> str:
        return format_dist(self)


def max_point_prob(d: FiniteDist) -> Fraction:
    """Q[X]: the largest atom probability."""
    return max(p for _, p in d.atoms)


def collision_prob(d: FiniteDist) -> Fraction:
    """Pr[X = X'] for an independent copy X'."""
    return sum((p * p for _, p in d.atoms), ZERO)


def convolve(d1: FiniteDist, d2: FiniteDist, cap: int = ATOM_CAP) -> FiniteDist:
    """Distribution of X + Y for independent X ~ d1, Y ~ d2."""
    if len(d1.atoms) * len(d2.atoms) > _PAIR_WORK_CAP:
        raise CapExceededError(
            f"convolution over {len(d1.atoms)}x{len(d2.atoms)} atom pairs "
            f"exceeds the work cap"
        )
    out = {}
    for v1, p1 in d1.atoms:
        for v2, p2 in d2.atoms:
            v = v1 + v2
            out[v] = out.get(v, ZERO) + p1 * p2
    if len(out) > cap:
        raise CapExceededError(f"convolution produced {len(out)} atoms, cap {cap}")
    return FiniteDist.from_pairs(out)


def symmetrize(d: FiniteDist, cap: int = ATOM_CAP) -> FiniteDist:
    """Distribution of X - X' for independent copies of d."""
    return convolve(d, d.negate(), cap=cap)


def convolve_all(dists, cap: int = ATOM_CAP) -> FiniteDist:
    """Exact distribution of the sum of independent summands."""
    acc = FiniteDist.point_mass(0)
    for d in dists:
        acc = convolve(acc, d, cap=cap)
    return acc


@dataclass(frozen=True)
class ThinningSpec:
    """n independent summands and the size k of the random index subset K."""

    n: int
    k: int
    dists: tuple

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ContractError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        dists = tuple(self.dists)
        if len(dists) != self.n:
            raise ContractError(f"need {self.n} summand distributions, got {len(dists)}")
        object.__setattr__(self, "dists", dists)


def _type_groups(dists):
    """Group equal distributions; subset sums only depend on type counts."""
    groups = []
    for d in dists:
        for entry in groups:
            if entry[0] == d:
                entry[1] += 1
                break
        else:
            groups.append([d, 1])
    return groups


def star_zero_prob(spec: ThinningSpec, cap: int = SUBSET_CAP) -> Fraction:
    """Exact Pr[X_K* = 0] with X_K* = sum_{i in K} (X_i - X_i').

    Averages the symmetrized subset-sum atom at 0 over all C(n, k)
    subsets K.  Equal summand distributions are grouped, so only the
    composition of K across groups is enumerated, weighted by the
    product of binomial coefficients.
    """
    n, k = spec.n, spec.k
    total_subsets = math.comb(n, k)
    if total_subsets > cap:
        raise CapExceededError(
            f"C({n},{k}) = {total_subsets} subsets exceeds the cap {cap}"
        )
    groups = _type_groups(spec.dists)
    sym = [symmetrize(d) for d, _ in groups]
    counts = [c for _, c in groups]
    powers = []
    for t, s in enumerate(sym):
        row = [FiniteDist.point_mass(0)]
        top = min(counts[t], k)
        for _ in range(top):
            row.append(convolve(row[-1], s))
        powers.append(row)

    suffix = list(itertools.accumulate(counts[::-1]))[::-1] + [0]
    total = ZERO

    def walk(t, remaining, weight, acc):
        nonlocal total
        if t == len(groups):
            total += weight * acc.prob(0)
            return
        lo = max(0, remaining - suffix[t + 1])
        hi = min(counts[t], remaining)
        for j in range(lo, hi + 1):
            nxt = acc if j == 0 else convolve(acc, powers[t][j])
            walk(t + 1, remaining - j, weight * math.comb(counts[t], j), nxt)

    walk(0, k, ONE, FiniteDist.point_mass(0))
    return total / total_subsets


def hypergeometric_empty_prob(n: int, k: int, isize: int) -> Fraction:
    """Pr[K cap I is empty] for a uniform k-subset K and fixed |I| = isize."""
    if not (0 <= k <= n and 0 <= isize <= n):
        raise ContractError(f"need k, isize in 0..n, got k={k}, isize={isize}, n={n}")
    if isize + k > n:
        return ZERO
    return Fraction(math.comb(n - isize, k), math.comb(n, k))


def sample_subsets(n: int, k: int, count: int, seed: int) -> np.ndarray:
    """``count`` uniform k-subsets of {1..n} as sorted 1-based rows."""
    if not 0 <= k <= n:
        raise ContractError(f"need 0 <= k <= n, got k={k}, n={n}")
    if count < 0:
        raise ContractError(f"negative count {count}")
    if k == 0:
        return np.zeros((count, 0), dtype=np.int64)
    if k == n:
        return np.tile(np.arange(1, n + 1, dtype=np.int64), (count, 1))
    gen = substream(seed, 0)
    u = gen.random((count, n))
    idx = np.argpartition(u, k, axis=1)[:, :k]
    return np.sort(idx, axis=1).astype(np.int64) + 1


def sample_subset(n: int, k: int, seed: int) -> ColumnSet:
    """One uniform k-subset of {1..n}, deterministic per seed."""
    row = sample_subsets(n, k, 1, seed)[0]
    return ColumnSet(n, tuple(int(i) for i in row))


def parse_dist(text: str) -> FiniteDist:
    """Read the line format ``value numerator/denominator``."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.replace("\u2212", "-").strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'value prob', got {raw!r}")
        try:
            pairs.append((Fraction(parts[0]), Fraction(parts[1])))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"line {lineno}: bad rational in {raw!r}") from exc
    if not pairs:
        raise ParseError("empty distribution")
    try:
        return FiniteDist.from_pairs(pairs)
    except ContractError as exc:
        raise ParseError(str(exc)) from exc


def format_dist(d: FiniteDist) -> str:
    return "".join(f"{fmt_value(v)} {fmt_frac(p)}\n" for v, p in d.atoms)


def dist_to_json(d: FiniteDist) -> list:
    return [{"v": fmt_value(v), "p": fmt_frac(p)} for v, p in d.atoms]


def dist_from_json(obj) -> FiniteDist:
    try:
        pairs = [(Fraction(a["v"]), Fraction(a["p"])) for a in obj]
        return FiniteDist.from_pairs(pairs)
    except (KeyError, TypeError, ValueError, ZeroDivisionError, ContractError) as exc:
        raise ParseError(f"bad distribution JSON: {exc}") from exc
