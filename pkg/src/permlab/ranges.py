"""The permanent range Phi_S(n): every value attained by an n x n matrix
with entries in S.

Enumeration runs over row multisets (the permanent ignores row order),
and for the +/-1 support additionally over sign-normalized cores whose
first row and column are +1; each core attains exactly +/-per(core), so
the range is the negation closure of the core values.  Both reductions
are value-set exact and are cross-checked against unreduced enumeration
in the tests.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapExceededError, ContractError, ParseError
from .matrices import IntMatrix
from .parallel import CHUNK
from .spectrum import (
    MULTISET_CAP,
    _core_row_table,
    _map_ordered,
    _multiset_payloads,
    _per_batch,
)

_WITNESS_MAX_N = 5


@dataclass(frozen=True)
class PermRange:
    """Sorted exact value set of permanents over a fixed entry support."""

    support: tuple
    n: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(sorted(int(v) for v in self.support)))
        object.__setattr__(self, "values", tuple(sorted(int(v) for v in self.values)))

    @property
    def count(self) -> int:
        return len(self.values)

    def negation_closed(self) -> bool:
        vals = set(self.values)
        return all(-v in vals for v in vals)


def _validate_support(support) -> list:
    values = sorted(int(v) for v in support)
    if len(set(values)) != len(values) or not values:
        raise ContractError(f"support must be nonempty distinct integers, got {support}")
    return values


def phi(
    support,
    n: int,
    reduction: str = "auto",
    workers: int = 1,
    cap: int | None = None,
) -> PermRange:
    rng, _ = _phi_impl(support, n, reduction, workers, cap, witnesses=False)
    return rng


def phi_with_witnesses(
    support,
    n: int,
    reduction: str = "auto",
    workers: int = 1,
    cap: int | None = None,
):
    """Range plus one witness matrix per attained value."""
    return _phi_impl(support, n, reduction, workers, cap, witnesses=True)


def _phi_impl(support, n, reduction, workers, cap, witnesses):
    values = _validate_support(support)
    if n < 1:
        raise ContractError(f"need n >= 1, got {n}")
    if reduction == "auto":
        reduction = "core" if values == [-1, 1] else "row-multiset"
    if reduction not in ("core", "row-multiset", "none"):
        raise ContractError(f"unknown reduction {reduction!r}")
    max_abs = max(abs(v) for v in values)
    use64 = _kernels.ryser_fits_int64(n, max_abs)
    if use64:
        _kernels.ryser_batch(np.zeros((1, n, n), dtype=np.int64))

    if reduction == "none":
        base = len(values)
        items = base ** (n * n)
        capv = MULTISET_CAP if cap is None else cap
        if items > capv:
            raise CapExceededError(f"{items} matrices exceed the cap {capv}")
        found: dict = {}
        for start in range(0, items, CHUNK):
            codes = np.arange(start, min(start + CHUNK, items), dtype=np.int64)
            mats = _kernels.decode_matrices(codes, n, values)
            for b, p in enumerate(_per_batch(mats, n, use64)):
                if p not in found:
                    found[p] = IntMatrix.from_array(mats[b]) if witnesses else None
        rng = PermRange(tuple(values), n, tuple(found))
        return rng, (found if witnesses else None)

    if reduction == "core":
        if values != [-1, 1]:
            raise ContractError("core reduction only applies to the +/-1 support")
        alphabet, size = 1 << (n - 1), n - 1
        table = _core_row_table(n)
    else:
        alphabet, size = len(values) ** n, n
        table = _kernels.mixed_radix_table(values, n)
    items = math.comb(alphabet + size - 1, size)
    capv = MULTISET_CAP if cap is None else cap
    if items > capv:
        raise CapExceededError(
            f"{items} row multisets exceed the cap {capv} for n={n}, |S|={len(values)}"
        )

    def work(ids):
        c = ids.shape[0]
        if reduction == "core":
            mats = np.empty((c, n, n), dtype=np.int64)
            mats[:, 0, :] = 1
            if size:
                mats[:, 1:, :] = table[ids]
        else:
            mats = table[ids]
        out = {}
        for b, p in enumerate(_per_batch(mats, n, use64)):
            if p not in out:
                out[p] = mats[b].copy() if witnesses else None
            if reduction == "core" and -p not in out:
                out[-p] = _negate_first_row(mats[b]) if witnesses else None
        return out

    found = {}
    for out in _map_ordered(work, _multiset_payloads(alphabet, size), workers):
        for p, wit in out.items():
            if p not in found:
                found[p] = IntMatrix.from_array(wit) if witnesses else None
    rng = PermRange(tuple(values), n, tuple(found))
    return rng, (found if witnesses else None)


def _negate_first_row(mat: np.ndarray) -> np.ndarray:
    out = mat.copy()
    out[0, :] = -out[0, :]
    return out


def check_brualdi_newman(n: int, store: "RangeStore | None" = None):
    """Is {0, ..., 2**(n-1)} contained in Phi_{0,1}(n)?  Returns witnesses.

    The witness map covers the required values with one {0,1} matrix
    each; it is populated up to n = 5 to bound artifact size.
    """
    want_witnesses = n <= _WITNESS_MAX_N
    if want_witnesses:
        rng, wit = phi_with_witnesses([0, 1], n)
    else:
        rng, wit = _range_via_store([0, 1], n, store), {}
    required = range(0, (1 << (n - 1)) + 1)
    vals = set(rng.values)
    holds = all(v in vals for v in required)
    witnesses = {}
    if want_witnesses and holds:
        witnesses = {v: wit[v] for v in required}
    return holds, witnesses


def check_krauter(n: int, store: "RangeStore | None" = None) -> bool:
    """Does Phi_{+/-1}(n) contain at least n + 1 values?"""
    return _range_via_store([-1, 1], n, store).count >= n + 1


def growth_report(maxn: int, store: "RangeStore | None" = None, workers: int = 1) -> list:
    """Rows (n, |Phi_{+/-1}(n)|, log |Phi(n)| / |Phi(n-1)|) for n = 1..maxn."""
    if maxn < 1:
        raise ContractError(f"need maxn >= 1, got {maxn}")
    rows = []
    prev = None
    for n in range(1, maxn + 1):
        card = _range_via_store([-1, 1], n, store, workers=workers).count
        ratio = None if prev is None else math.log(card / prev)
        rows.append((n, card, ratio))
        prev = card
    return rows


def _range_via_store(support, n, store, workers: int = 1) -> PermRange:
    if store is None:
        return phi(support, n, workers=workers)
    return store.get_or_compute(support, n, workers=workers)


def _range_sha(support, n, values) -> str:
    payload = json.dumps(
        {"support": list(support), "n": n, "values": [str(v) for v in values]},
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def range_to_json(rng: PermRange) -> dict:
    return {
        "support": list(rng.support),
        "n": rng.n,
        "values": [str(v) for v in rng.values],
        "count": rng.count,
        "sha": _range_sha(rng.support, rng.n, rng.values),
    }


def range_from_json(obj) -> PermRange:
    try:
        rng = PermRange(
            tuple(int(v) for v in obj["support"]),
            int(obj["n"]),
            tuple(int(v) for v in obj["values"]),
        )
        if int(obj["count"]) != rng.count:
            raise ParseError("range count does not match its value list")
        if obj["sha"] != _range_sha(rng.support, rng.n, rng.values):
            raise ParseError("range checksum mismatch")
        return rng
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad range JSON: {exc}") from exc


class RangeStore:
    """Content-addressed cache of computed ranges, one JSON file each."""

    def __init__(self, root):
        self.root = str(root)
        os.makedirs(self.root, exist_ok=True)

    def _path(self, support, n) -> str:
        tag = "_".join(str(v) for v in sorted(support)).replace("-", "m")
        return os.path.join(self.root, f"phi_{tag}_n{n}.json")

    def load(self, support, n) -> "PermRange | None":
        path = self._path(support, n)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return range_from_json(json.load(fh))

    def save(self, rng: PermRange) -> str:
        path = self._path(rng.support, rng.n)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(range_to_json(rng), fh, separators=(",", ":"))
            fh.write("\n")
        return path

    def get_or_compute(self, support, n, workers: int = 1) -> PermRange:
        cached = self.load(support, n)
        if cached is not None:
            return cached
        rng = phi(support, n, workers=workers)
        self.save(rng)
        return rng
