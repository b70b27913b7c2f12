"""The constant pipeline behind the exponential bound on Q[per].

tau(p) is the limiting value of the easy recursion bound; the constant
chain picks mu, eps, t and a growth rate c_p subject to seven exact
constraints, and check_inductive_step replays the closing display

    f(n) exp(c_p n) <= L1 <= L2 <= L3 <= L4 <= 1

with certified rational brackets, so every comparison is a proof at the
chosen precision rather than a float estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .brackets import DEFAULT_PREC, Interval, certainly_le, exp_bracket, sqrt_bracket
from .dists import fmt_frac
from .errors import CapExceededError, ContractError

TAU_MAX_TERMS = 10**5
_GRID_BITS = 20
_GRID_BITS_MAX = 400
_T_MAX = 10**4


def tau(p, tol) -> Interval:
    """Bracket of width <= tol around 1 - prod_{s>=1} (1 - p^s).

    Truncates the product at S factors; the discarded tail lies between
    1 - p^(S+1)/(1-p) and 1, which turns the partial product into certified
    two-sided bounds.
    """
    p, tol = Fraction(p), Fraction(tol)
    if not 0 < p < 1:
        raise ContractError(f"need 0 < p < 1, got {fmt_frac(p)}")
    if tol <= 0:
        raise ContractError("tolerance must be positive")
    partial = Fraction(1)
    power = Fraction(1)
    for s in range(1, TAU_MAX_TERMS + 1):
        power *= p
        partial *= 1 - power
        tail = power * p / (1 - p)
        lo = 1 - partial
        hi = 1 - partial * (1 - tail) if tail < 1 else Fraction(1)
        if hi - lo <= tol:
            return Interval(lo, hi)
    raise CapExceededError(f"no bracket of width {fmt_frac(tol)} within {TAU_MAX_TERMS} factors")


def easy_fp_bound(p, n: int) -> Fraction:
    """Exact value of 1 - prod_{s=1}^{n} (1 - p^s); zero when n = 0."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise ContractError(f"need 0 < p < 1, got {fmt_frac(p)}")
    if n < 0:
        raise ContractError(f"need n >= 0, got {n}")
    partial = Fraction(1)
    power = Fraction(1)
    for _ in range(n):
        power *= p
        partial *= 1 - power
    return 1 - partial


@dataclass(frozen=True)
class Constraint:
    """One exact comparison lhs < rhs from the constant-selection chain.

    Comparisons with irrational sides are recorded through an equivalent
    rational pair (squared form, or a certified bracket endpoint).
    """

    name: str
    lhs: Fraction
    rhs: Fraction
    satisfied: bool


@dataclass(frozen=True)
class ConstantChain:
    """A candidate tuple (p, tau, mu, eps, t, delta, c_p, N) with verdicts."""

    p: Fraction
    tau: Interval
    mu: Fraction
    eps: Fraction
    t: int
    delta: Fraction
    c_p: Fraction
    N: int
    constraints: tuple

    @property
    def feasible(self) -> bool:
        return all(c.satisfied for c in self.constraints)

    def failing(self) -> tuple:
        return tuple(c.name for c in self.constraints if not c.satisfied)


def chain_constraints(
    p: Fraction,
    tau_iv: Interval,
    mu: Fraction,
    eps: Fraction,
    t: int,
    delta: Fraction,
    c_p: Fraction,
    prec: int = DEFAULT_PREC,
) -> tuple:
    """Evaluate the seven selection constraints exactly.

    Order: tau < 1-5mu; eps < (1-sqrt p)mu; (1+eps)tau < 1-4mu;
    p^(t/2) < (1-sqrt p)mu; c_p < delta/2; exp(c_p) < p^(-1/2);
    (1-4mu)exp(c_p t) < 1-3mu.
    """
    out = [
        Constraint("tau < 1-5mu", tau_iv.hi, 1 - 5 * mu, tau_iv.hi < 1 - 5 * mu)
    ]
    # eps < (1-sqrt p)mu  iff  sqrt(p) < 1 - eps/mu  iff  p < (1 - eps/mu)^2
    c = 1 - eps / mu
    out.append(
        Constraint(
            "eps < (1-sqrt p)mu [as p < (1-eps/mu)^2]",
            p,
            c * c if c > 0 else Fraction(0),
            c > 0 and p < c * c,
        )
    )
    lhs3 = ((1 + eps) * tau_iv).hi
    out.append(Constraint("(1+eps)tau < 1-4mu", lhs3, 1 - 4 * mu, lhs3 < 1 - 4 * mu))
    lhs4, rhs4, ok4 = _lt_sqrt_margin_pow(p, t, mu)
    out.append(Constraint("p^(t/2) < (1-sqrt p)mu [double squared]", lhs4, rhs4, ok4))
    out.append(Constraint("c_p < delta/2", c_p, delta / 2, c_p < delta / 2))
    lhs6 = exp_bracket(2 * c_p, prec).hi
    out.append(Constraint("exp(c_p) < p^(-1/2) [as exp(2c_p) < 1/p]", lhs6, 1 / p, lhs6 < 1 / p))
    lhs7 = ((1 - 4 * mu) * exp_bracket(Fraction(c_p) * t, prec)).hi
    out.append(Constraint("(1-4mu)exp(c_p t) < 1-3mu", lhs7, 1 - 3 * mu, lhs7 < 1 - 3 * mu))
    return tuple(out)


def _lt_sqrt_margin_pow(p: Fraction, t: int, mu: Fraction) -> tuple:
    """Exact test of p^(t/2) < (1 - sqrt p) mu via double squaring.

    p^(t/2) < (1-sqrt p)mu  iff  p^t < mu^2 (1 - sqrt p)^2
    iff  D := mu^2 (1+p) - p^t > 0  and  4 mu^4 p < D^2.
    """
    d = mu * mu * (1 + p) - p**t
    lhs = 4 * mu**4 * p
    rhs = d * d if d > 0 else Fraction(0)
    return lhs, rhs, d > 0 and lhs < rhs


def _grid_below(bound: Fraction, bits: int) -> Optional[Fraction]:
    """Largest m/2^bits strictly below bound, or None if none is positive."""
    step = Fraction(1, 1 << bits)
    m = (bound.numerator * (1 << bits)) // bound.denominator
    if Fraction(m, 1 << bits) >= bound:
        m -= 1
    return m * step if m >= 1 else None


def derive_constants(
    p, delta_hyp, n_hyp: int, prec: int = DEFAULT_PREC
) -> ConstantChain:
    """Select (mu, eps, t, c_p) on dyadic grids for hypothesized delta, N.

    mu is the largest grid point with tau < 1-5mu certified; eps the
    largest satisfying its two constraints; t minimal; c_p the largest
    satisfying the three growth constraints.  Infeasible inputs still
    produce a chain, with the failing constraints flagged.
    """
    p, delta = Fraction(p), Fraction(delta_hyp)
    if not 0 < p < 1:
        raise ContractError(f"need 0 < p < 1, got {fmt_frac(p)}")
    if n_hyp < 1:
        raise ContractError(f"need N >= 1, got {n_hyp}")
    tau_iv = tau(p, Fraction(1, 10**15))

    bits = _GRID_BITS
    headroom = (1 - tau_iv.hi) / 5
    while headroom < Fraction(8, 1 << bits) and bits < _GRID_BITS_MAX:
        bits += 10
    mu = _grid_below(headroom, bits) or Fraction(1, 1 << _GRID_BITS_MAX)

    def eps_ok(e: Fraction) -> bool:
        c = 1 - e / mu
        if not (c > 0 and p < c * c):
            return False
        return ((1 + e) * tau_iv).hi < 1 - 4 * mu

    eps = _search_grid(eps_ok, _adapt_bits(eps_ok, bits))

    t = 1
    while t < _T_MAX and not _lt_sqrt_margin_pow(p, t, mu)[2]:
        t += 1

    def c_ok(c: Fraction) -> bool:
        if not c < delta / 2:
            return False
        if not exp_bracket(2 * c, prec).hi < 1 / p:
            return False
        return ((1 - 4 * mu) * exp_bracket(c * t, prec)).hi < 1 - 3 * mu

    c_p = _search_grid(c_ok, _adapt_bits(c_ok, bits))

    constraints = chain_constraints(p, tau_iv, mu, eps, t, delta, c_p, prec)
    return ConstantChain(p, tau_iv, mu, eps, t, delta, c_p, n_hyp, constraints)


def _adapt_bits(ok, bits: int) -> int:
    """Refine the grid until its smallest point passes, or hit the cap."""
    while bits < _GRID_BITS_MAX and not ok(Fraction(1, 1 << bits)):
        bits += 10
    return bits


def _search_grid(ok, bits: int) -> Fraction:
    """Largest m/2^bits passing a monotone predicate; smallest point if none."""
    step = Fraction(1, 1 << bits)
    if not ok(step):
        return step
    lo, hi = 1, 2
    while ok(hi * step):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid * step):
            lo = mid
        else:
            hi = mid
    return lo * step


def _half_power(p: Fraction, s: int, sqrt_p: Interval) -> Interval:
    """Certified bracket of p^(s/2)."""
    if s % 2 == 0:
        return Interval.point(p ** (s // 2))
    return sqrt_p * p ** ((s - 1) // 2)


def _half_power_sum(p: Fraction, lo: int, hi: int, sqrt_p: Interval) -> Interval:
    """Certified bracket of sum_{s=lo}^{hi} p^(s/2), split by parity."""
    even = sum(p ** (s // 2) for s in range(lo, hi + 1) if s % 2 == 0)
    odd = sum(p ** ((s - 1) // 2) for s in range(lo, hi + 1) if s % 2 == 1)
    return Interval.point(Fraction(even)) + sqrt_p * Fraction(odd)


def check_inductive_step(
    chain: ConstantChain, n: int, f_vals=None, prec: int = DEFAULT_PREC
):
    """Replay the closing display of the exponential bound at size n.

    Under the induction hypothesis f(m) <= exp(-c_p m) for m < n, the
    recursion gives f(n) exp(c_p n) <= L1, and the display walks
    L1 <= L2 <= L3 <= L4 <= 1.  Each line is evaluated as a certified
    bracket.  The L2 <= L3 comparison cancels the terms the two lines
    share (their sum parts are algebraically equal) and brackets only the
    residual exp(-dN/2) - exp(-dn/2), which is exactly zero at n = N.

    Optional f_vals maps sizes m to known upper bounds on f(m); each is
    checked against exp(-c_p m) as a sanity pass on the hypothesis.
    """
    from .inequalities import InequalityReport

    if n < chain.N:
        raise ContractError(f"need n >= N = {chain.N}, got {n}")
    if not chain.feasible:
        first = chain.failing()[0]
        return InequalityReport(
            "inductive-step",
            lhs=Fraction(0),
            rhs=Fraction(1),
            holds=False,
            witness=f"infeasible chain; first failing constraint: {first}",
        )
    p, mu, eps, t, delta, c_p = (
        chain.p, chain.mu, chain.eps, chain.t, chain.delta, chain.c_p,
    )
    if not 1 <= t <= n:
        raise ContractError(f"need 1 <= t <= n, got t={t}, n={n}")
    sqrt_p = sqrt_bracket(p, prec)
    geom = (1 - sqrt_p).reciprocal()

    line1 = (
        exp_bracket(-(delta - c_p) * n, prec)
        + eps * sum(
            (p**s * exp_bracket(c_p * s, prec) for s in range(1, t + 1)),
            Interval.point(0),
        )
        + (1 - 4 * mu) * exp_bracket(c_p * t, prec)
        + (1 + eps) * sum(
            (p**s * exp_bracket(c_p * s, prec) for s in range(t + 1, n + 1)),
            Interval.point(0),
        )
    )
    head = _half_power_sum(p, 1, t, sqrt_p)
    tail = _half_power_sum(p, t + 1, n, sqrt_p)
    line2 = exp_bracket(-delta * n / 2, prec) + eps * head + (1 - 3 * mu) + (1 + eps) * tail
    line3 = (
        (1 - 3 * mu)
        + exp_bracket(-delta * chain.N / 2, prec)
        + eps * _half_power_sum(p, 1, n, sqrt_p)
        + tail
    )
    line4 = (
        (1 - 3 * mu)
        + exp_bracket(-delta * chain.N / 2, prec)
        + eps * geom
        + _half_power(p, t, sqrt_p) * geom
    )

    # L3 - L2 = exp(-dN/2) - exp(-dn/2) after the shared sums cancel.
    residual = exp_bracket(-delta * chain.N / 2, prec) - exp_bracket(-delta * n / 2, prec)
    slack2 = Interval.point(0) if n == chain.N else residual
    steps = [
        ("L1<=L2", line2 - line1, certainly_le(line1, line2)),
        ("L2<=L3", slack2, n == chain.N or residual.lo >= 0),
        ("L3<=L4", line4 - line3, certainly_le(line3, line4)),
        ("L4<=1", 1 - line4, line4.hi <= 1),
    ]
    holds = all(ok for _, _, ok in steps)
    first_bad = next((name for name, _, ok in steps if not ok), None)
    parts = [f"{name} slack>={float(gap.lo):.3e}" for name, gap, _ in steps]
    if f_vals:
        for m, bound in sorted(f_vals.items()):
            cert = exp_bracket(-c_p * m, prec).lo
            tag = "ok" if Fraction(bound) <= cert else "VIOLATED"
            parts.append(f"f({m})<=exp(-c_p {m}) {tag}")
            if Fraction(bound) > cert:
                holds = False
                first_bad = first_bad or f"hypothesis f({m})"
    witness = f"n={n} " + "; ".join(parts)
    if first_bad:
        witness += f"; first failing line: {first_bad}"
    lhs = line1.hi
    if lhs.numerator.bit_length() > _FMT_MAX_BITS or lhs.denominator.bit_length() > _FMT_MAX_BITS:
        lhs = round_frac(lhs, "ceil")
    return InequalityReport(
        "inductive-step",
        lhs=lhs,
        rhs=Fraction(1),
        holds=holds,
        witness=witness,
    )


_ROUND_DIGITS = 40
_FMT_MAX_BITS = 400


def round_frac(q, mode: str = "nearest", digits: int = _ROUND_DIGITS) -> Fraction:
    """q rounded onto the 10**-digits grid; floor and ceil keep direction."""
    scale = 10**digits
    scaled = Fraction(q) * scale
    if mode == "floor":
        num = math.floor(scaled)
    elif mode == "ceil":
        num = math.ceil(scaled)
    else:
        num = round(scaled)
    return Fraction(num, scale)


def _fmt_bounded(q: Fraction, mode: str = "nearest") -> str:
    """a/b form, rounded only when the exact form would be enormous."""
    if q.numerator.bit_length() <= _FMT_MAX_BITS and q.denominator.bit_length() <= _FMT_MAX_BITS:
        return fmt_frac(q)
    return fmt_frac(round_frac(q, mode))


def chain_to_json(chain: ConstantChain) -> dict:
    """Serializable view of a chain; rationals use the a/b form.

    Huge exact endpoints (the tau bracket can carry thousands of digits)
    are outer-rounded to 40 decimal digits, so the emitted bracket still
    encloses the true value; grid constants stay exact.
    """
    return {
        "p": fmt_frac(chain.p),
        "tau": {
            "lo": _fmt_bounded(chain.tau.lo, "floor"),
            "hi": _fmt_bounded(chain.tau.hi, "ceil"),
        },
        "mu": fmt_frac(chain.mu),
        "eps": fmt_frac(chain.eps),
        "t": chain.t,
        "delta": fmt_frac(chain.delta),
        "c_p": fmt_frac(chain.c_p),
        "N": chain.N,
        "feasible": chain.feasible,
        "constraints": [
            {
                "name": c.name,
                "lhs": _fmt_bounded(c.lhs),
                "rhs": _fmt_bounded(c.rhs),
                "satisfied": c.satisfied,
            }
            for c in chain.constraints
        ],
    }
