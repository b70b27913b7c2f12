"""Distribution of per(A_n) for random matrices with iid discrete entries.

Exact spectra count every matrix over the entry support, with optional
symmetry reductions that are provably output-identical:

* ``row-multiset``: the permanent is invariant under row permutation, so
  matrices are enumerated as multisets of rows weighted by multinomial
  coefficients.  Requires a uniform entry distribution (weights would be
  class-dependent otherwise).
* ``full`` (uniform +/-1 support only): sign flips normalize the first row and
  column to +1.  Each canonical core stands for ``2**(2n-1)`` matrices,
  exactly half carrying each permanent sign, and the core's free rows
  are again enumerated as a multiset.

Counts are integers over an integer total: a matrix with entry
probabilities ``num_v / D`` contributes ``prod(num_v)`` to its atom out
of ``total = D**(n*n)``; in the uniform case this is plain counting.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import beta as _beta

from . import _kernels
from .dists import FiniteDist, fmt_frac
from .errors import CapExceededError, ContractError
from .matrices import IntMatrix, per_ryser
from .parallel import CHUNK, run_chunks
from .rng import DRAW_BLOCK, substream

CODE_CAP = 1 << 26
MULTISET_CAP = 1 << 22
REDUCTIONS = ("none", "row-multiset", "full")


@dataclass(frozen=True)
class Spectrum:
    """Permanent-value distribution: exact counts or MC estimates.

    Exact atoms are ``(value, count)`` with counts summing to ``total``;
    estimated atoms are ``(value, hits, ci)`` where ``hits / total`` is
    the point estimate and ``ci`` the 99% confidence half-width.
    """

    kind: str
    n: int
    total: int
    atoms: tuple

    def __post_init__(self):
        if self.kind not in ("exact", "estimated"):
            raise ContractError(f"unknown spectrum kind {self.kind!r}")
        if self.total < 1:
            raise ContractError("total must be positive")
        atoms = tuple(self.atoms)
        if self.kind == "exact":
            if sum(c for _, c in atoms) != self.total:
                raise ContractError("exact counts must sum to the total weight")
            if any(c <= 0 for _, c in atoms):
                raise ContractError("exact counts must be positive")
        else:
            if any(not 0 <= h <= self.total for _, h, _ in atoms):
                raise ContractError("estimates must lie in [0, 1]")
        object.__setattr__(self, "atoms", atoms)

    def probability(self, value) -> Fraction:
        value = int(value)
        for atom in self.atoms:
            if atom[0] == value:
                return Fraction(atom[1], self.total)
        if self.kind == "estimated":
            raise ContractError(f"value {value} was not a tracked target")
        return Fraction(0)


def q_max(s: Spectrum) -> Fraction:
    """Largest point probability (exact) or largest estimate (MC)."""
    if not s.atoms:
        raise ContractError("empty spectrum has no maximum")
    return max(Fraction(a[1], s.total) for a in s.atoms)


def _require_integer_support(entry: FiniteDist) -> list:
    if not entry.integer_valued:
        raise ContractError("spectrum entries must have integer support")
    return [int(v) for v in entry.support]


def _multinomial_denominators(ids: np.ndarray) -> np.ndarray:
    """Product of m! over the multiplicities of each sorted id row."""
    c, size = ids.shape
    denom = np.ones(c, dtype=np.int64)
    run = np.ones(c, dtype=np.int64)
    for j in range(1, size):
        same = ids[:, j] == ids[:, j - 1]
        run = np.where(same, run + 1, 1)
        denom *= np.where(same, run, 1)
    return denom


def _multiset_payloads(alphabet_size: int, size: int, chunk: int = CHUNK):
    """Sorted id tuples of the given size, chunked as int64 arrays."""
    it = itertools.combinations_with_replacement(range(alphabet_size), size)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), size)


def _core_row_table(n: int) -> np.ndarray:
    """The 2**(n-1) possible +/-1 rows whose first entry is +1."""
    free = _kernels.mixed_radix_table([-1, 1], n - 1)
    return np.hstack([np.ones((free.shape[0], 1), dtype=np.int64), free])


def _per_batch(mats: np.ndarray, n: int, use64: bool) -> list:
    if use64:
        return [int(p) for p in _kernels.ryser_batch(mats)]
    return [per_ryser(IntMatrix.from_array(mats[b])) for b in range(mats.shape[0])]


def _map_ordered(fn, payloads, workers: int) -> list:
    if workers <= 1:
        return [fn(p) for p in payloads]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, payloads))


def exact_spectrum(
    n: int,
    entry: FiniteDist,
    reduction: str = "none",
    workers: int = 1,
    cap: int | None = None,
) -> Spectrum:
    """Exact distribution of per(A_n) with iid entries drawn from ``entry``."""
    if n < 1:
        raise ContractError(f"need n >= 1, got {n}")
    if reduction not in REDUCTIONS:
        raise ContractError(f"reduction must be one of {REDUCTIONS}, got {reduction!r}")
    values = _require_integer_support(entry)
    nums = entry.numerators()
    uniform = len(set(nums)) == 1
    if reduction != "none" and not uniform:
        raise ContractError(
            "symmetry reductions require a uniform entry distribution"
        )
    max_abs = max(abs(v) for v in values)
    use64 = _kernels.ryser_fits_int64(n, max_abs)
    if use64:
        _kernels.ryser_batch(np.zeros((1, n, n), dtype=np.int64))
    counts: dict = {}

    if reduction == "none":
        base = len(values)
        items = base ** (n * n)
        capv = CODE_CAP if cap is None else cap
        if items > capv:
            raise CapExceededError(
                f"{base}**{n * n} = {items} matrices exceed the cap {capv}"
            )
        d = entry.common_denominator()
        total = d ** (n * n)
        numarr = np.array(nums, dtype=np.int64)
        vec_weights = uniform or max(nums) ** (n * n) < 1 << 62

        def work(start, stop, _idx):
            codes = np.arange(start, stop, dtype=np.int64)
            mats = _kernels.decode_matrices(codes, n, values)
            pers = _per_batch(mats, n, use64)
            out: dict = {}
            if uniform:
                for p in pers:
                    out[p] = out.get(p, 0) + 1
                return out
            if vec_weights:
                w = np.ones(stop - start, dtype=np.int64)
                c = codes.copy()
                for _pos in range(n * n):
                    w *= numarr[c % base]
                    c //= base
                weights = [int(x) for x in w]
            else:
                weights = []
                for code in range(start, stop):
                    w = 1
                    c = code
                    for _pos in range(n * n):
                        w *= nums[c % base]
                        c //= base
                    weights.append(w)
            for p, w in zip(pers, weights):
                out[p] = out.get(p, 0) + w
            return out

        for out in run_chunks(items, work, workers=workers):
            for v, c in out.items():
                counts[v] = counts.get(v, 0) + c
        return Spectrum("exact", n, total, _sorted_atoms(counts))

    if reduction == "full":
        if values != [-1, 1]:
            raise ContractError("full reduction needs the uniform +/-1 support")
        alphabet, size = 1 << (n - 1), n - 1
        table = _core_row_table(n)
        per_sign = 1 << (2 * n - 2)
    else:
        alphabet, size = len(values) ** n, n
        table = _kernels.mixed_radix_table(values, n)
        per_sign = 0
    items = math.comb(alphabet + size - 1, size)
    capv = MULTISET_CAP if cap is None else cap
    if items > capv:
        raise CapExceededError(
            f"{items} row multisets exceed the cap {capv}; "
            f"use reduction='none' or a smaller n"
        )
    total = len(values) ** (n * n)
    size_fact = math.factorial(size)

    def work_multiset(ids):
        weights = size_fact // _multinomial_denominators(ids)
        c = ids.shape[0]
        if reduction == "full":
            mats = np.empty((c, n, n), dtype=np.int64)
            mats[:, 0, :] = 1
            if size:
                mats[:, 1:, :] = table[ids]
        else:
            mats = table[ids]
        pers = _per_batch(mats, n, use64)
        out: dict = {}
        if reduction == "full":
            for p, w in zip(pers, weights.tolist()):
                w *= per_sign
                out[p] = out.get(p, 0) + w
                out[-p] = out.get(-p, 0) + w
        else:
            for p, w in zip(pers, weights.tolist()):
                out[p] = out.get(p, 0) + w
        return out

    for out in _map_ordered(work_multiset, _multiset_payloads(alphabet, size), workers):
        for v, c in out.items():
            counts[v] = counts.get(v, 0) + c
    return Spectrum("exact", n, total, _sorted_atoms(counts))


def _sorted_atoms(counts: dict) -> tuple:
    return tuple((v, counts[v]) for v in sorted(counts))


def _cp_halfwidth(hits: int, samples: int, alpha: float = 0.01) -> Fraction:
    """99% Clopper-Pearson half-width around hits/samples (exact binomial)."""
    est = Fraction(hits, samples)
    lo = Fraction(0) if hits == 0 else Fraction(float(_beta.ppf(alpha / 2, hits, samples - hits + 1)))
    hi = Fraction(1) if hits == samples else Fraction(float(_beta.ppf(1 - alpha / 2, hits + 1, samples - hits)))
    return max(hi - est, est - lo)


def mc_spectrum(
    n: int,
    entry: FiniteDist,
    targets=(0,),
    samples: int = 10**5,
    seed: int = 0,
    workers: int = 1,
) -> Spectrum:
    """Monte Carlo estimates of Pr[per(A_n) = x] for each target x.

    Sample ``i`` is always drawn from counter stream ``i // DRAW_BLOCK``,
    so results are byte-identical for any worker count.
    """
    if n < 1:
        raise ContractError(f"need n >= 1, got {n}")
    if samples < 1:
        raise ContractError(f"need samples >= 1, got {samples}")
    values = _require_integer_support(entry)
    tg = [int(t) for t in targets]
    if len(set(tg)) != len(tg):
        raise ContractError("duplicate target values")
    if not tg:
        raise ContractError("need at least one target value")
    use64 = _kernels.ryser_fits_int64(n, max(abs(v) for v in values))
    if use64:
        _kernels.ryser_batch(np.zeros((1, n, n), dtype=np.int64))

    def work(start, stop, idx):
        gen = substream(seed, idx)
        count = stop - start
        mats = entry.sample_values(gen, count * n * n).reshape(count, n, n)
        pers = _per_batch(mats, n, use64)
        arr = np.array(pers, dtype=object) if not use64 else np.array(pers, dtype=np.int64)
        return [int((arr == t).sum()) for t in tg]

    parts = run_chunks(samples, work, workers=workers, chunk=DRAW_BLOCK)
    hits = [sum(part[j] for part in parts) for j in range(len(tg))]
    atoms = tuple((t, h, _cp_halfwidth(h, samples)) for t, h in zip(tg, hits))
    return Spectrum("estimated", n, samples, atoms)


def spectrum_to_json(s: Spectrum) -> dict:
    atoms = []
    for atom in s.atoms:
        if s.kind == "exact":
            atoms.append(
                {
                    "value": str(atom[0]),
                    "count": str(atom[1]),
                    "prob": fmt_frac(Fraction(atom[1], s.total)),
                }
            )
        else:
            atoms.append(
                {
                    "value": str(atom[0]),
                    "estimate": fmt_frac(Fraction(atom[1], s.total)),
                    "ci": fmt_frac(atom[2]),
                }
            )
    return {"n": s.n, "kind": s.kind, "total": str(s.total), "atoms": atoms}


def spectrum_to_csv(s: Spectrum) -> str:
    lines = ["value,count_or_estimate,ci"]
    for atom in s.atoms:
        if s.kind == "exact":
            lines.append(f"{atom[0]},{atom[1]},")
        else:
            lines.append(
                f"{atom[0]},{fmt_frac(Fraction(atom[1], s.total))},{fmt_frac(atom[2])}"
            )
    return "\n".join(lines) + "\n"
