"""Exact integer matrices, permanent kernels, and submatrix indexing.

Conventions used throughout the package:

* Row and column indices in the public API are 1-based and columns live
  in a universe ``{1, ..., n+T}``; ``ColumnSet`` carries that universe.
* ``A[-I]`` denotes the square submatrix made of the first
  ``universe - |I|`` rows and the columns outside ``I``.
* The permanent and determinant of the 0x0 matrix are 1, so base cases
  of the minor expansion are well-defined.

Kernels are exact.  Fast paths run in int64 only when a worst-case bound
proves no intermediate can overflow; otherwise arithmetic falls back to
Python integers with explicit detection against the documented signed
128-bit accumulator contract (values are never silently wrapped).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import AccumulatorOverflowError, ContractError, ParseError

ACC_LIMIT = 1 << 127
RYSER_MAX_SIDE = 34
NAIVE_MAX_SIDE = 10

_PERM_CHUNK = 1 << 17


@dataclass(frozen=True)
class IntMatrix:
    """Immutable rectangular matrix of exact integers, row-major."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ContractError(f"negative shape {self.rows}x{self.cols}")
        ents = tuple(int(e) for e in self.entries)
        if len(ents) != self.rows * self.cols:
            raise ContractError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(ents)}"
            )
        object.__setattr__(self, "entries", ents)

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        rows = [tuple(int(e) for e in r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ContractError("ragged rows")
        return cls(len(rows), ncols, tuple(e for r in rows for e in r))

    @classmethod
    def from_array(cls, arr) -> "IntMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ContractError(f"need a 2-d array, got ndim={arr.ndim}")
        return cls(arr.shape[0], arr.shape[1], tuple(int(e) for e in arr.ravel()))

    def entry(self, i: int, j: int) -> int:
        """Entry at 1-based row ``i``, column ``j``."""
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise ContractError(f"index ({i},{j}) outside {self.rows}x{self.cols}")
        return self.entries[(i - 1) * self.cols + (j - 1)]

    def row(self, i: int) -> tuple:
        if not 1 <= i <= self.rows:
            raise ContractError(f"row {i} outside 1..{self.rows}")
        return self.entries[(i - 1) * self.cols : i * self.cols]

    def col(self, j: int) -> tuple:
        if not 1 <= j <= self.cols:
            raise ContractError(f"column {j} outside 1..{self.cols}")
        return self.entries[j - 1 :: self.cols]

    @property
    def square(self) -> bool:
        return self.rows == self.cols

    def max_abs(self) -> int:
        return max((abs(e) for e in self.entries), default=0)

    def to_array(self) -> np.ndarray:
        if self.max_abs() >= 1 << 62:
            raise AccumulatorOverflowError(
                "entries too large for the int64 array view", bound=1 << 62
            )
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.col(j) for j in range(1, self.cols + 1)])

    def permute_rows(self, order) -> "IntMatrix":
        """Reorder rows; ``order`` lists 1-based source rows."""
        if sorted(order) != list(range(1, self.rows + 1)):
            raise ContractError("order must be a permutation of the row indices")
        return IntMatrix.from_rows([self.row(i) for i in order])

    def permute_cols(self, order) -> "IntMatrix":
        if sorted(order) != list(range(1, self.cols + 1)):
            raise ContractError("order must be a permutation of the column indices")
        return self.transpose().permute_rows(order).transpose()

    def negate_row(self, i: int) -> "IntMatrix":
        rows = [
            tuple(-e for e in self.row(r)) if r == i else self.row(r)
            for r in range(1, self.rows + 1)
        ]
        return IntMatrix.from_rows(rows)

    def __str__(self) -> str:
        return format_matrix(self)


def identity(n: int) -> IntMatrix:
    return IntMatrix(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))


def ones(rows: int, cols: int | None = None) -> IntMatrix:
    cols = rows if cols is None else cols
    return IntMatrix(rows, cols, (1,) * (rows * cols))


@dataclass(frozen=True)
class ColumnSet:
    """Subset of the 1-based column universe ``{1, ..., universe}``."""

    universe: int
    members: tuple

    def __post_init__(self):
        if self.universe < 0:
            raise ContractError(f"negative universe {self.universe}")
        mem = tuple(sorted(int(i) for i in self.members))
        if len(set(mem)) != len(mem):
            raise ContractError(f"duplicate column indices in {mem}")
        if mem and not (1 <= mem[0] and mem[-1] <= self.universe):
            raise ContractError(f"columns {mem} outside 1..{self.universe}")
        object.__setattr__(self, "members", mem)

    def complement(self) -> "ColumnSet":
        inside = set(self.members)
        return ColumnSet(
            self.universe, tuple(i for i in range(1, self.universe + 1) if i not in inside)
        )

    def plus(self, i: int) -> "ColumnSet":
        if i in self.members:
            raise ContractError(f"column {i} already present")
        return ColumnSet(self.universe, self.members + (i,))

    def minus(self, i: int) -> "ColumnSet":
        if i not in self.members:
            raise ContractError(f"column {i} not present")
        return ColumnSet(self.universe, tuple(j for j in self.members if j != i))

    def __contains__(self, i) -> bool:
        return i in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def _side(M: IntMatrix) -> int:
    if not M.square:
        raise ContractError(f"matrix must be square, got {M.rows}x{M.cols}")
    return M.rows


@lru_cache(maxsize=None)
def _perm_table(side: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(side))), dtype=np.int64)


@lru_cache(maxsize=None)
def _parity_signs(side: int) -> np.ndarray:
    return _parity_of(_perm_table(side))


def _parity_of(perms: np.ndarray) -> np.ndarray:
    """Signs (+1/-1) of a (P, side) array of permutations via inversions."""
    side = perms.shape[1]
    inv = np.zeros(perms.shape[0], dtype=np.int64)
    for a in range(side):
        for b in range(a + 1, side):
            inv += perms[:, a] > perms[:, b]
    return np.where(inv % 2 == 0, 1, -1).astype(np.int64)


def _perm_chunks(side: int, chunk: int):
    it = itertools.permutations(range(side))
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def _signed_perm_sum(M: IntMatrix, side: int, signed: bool) -> int:
    """Permutation-sum kernel shared by per_naive and det_naive."""
    if side == 0:
        return 1
    mx = M.max_abs()
    safe = math.factorial(side) * max(mx, 1) ** side < 1 << 62
    if safe:
        a = M.to_array()
        rowidx = np.arange(side)[None, :]
        if side <= 8:
            perms = _perm_table(side)
            prods = a[rowidx, perms].prod(axis=1, dtype=np.int64)
            if signed:
                prods = prods * _parity_signs(side)
            return int(prods.sum(dtype=np.int64))
        total = 0
        for perms in _perm_chunks(side, _PERM_CHUNK):
            prods = a[rowidx, perms].prod(axis=1, dtype=np.int64)
            if signed:
                prods = prods * _parity_of(perms)
            total += int(prods.sum(dtype=np.int64))
        return total
    return _signed_perm_sum_bigint(M, side, signed)


def _signed_perm_sum_bigint(M: IntMatrix, side: int, signed: bool) -> int:
    rows = [M.row(i) for i in range(1, side + 1)]
    total = 0
    for perm in itertools.permutations(range(side)):
        prod = 1
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        if signed:
            inv = sum(
                perm[a] > perm[b] for a in range(side) for b in range(a + 1, side)
            )
            if inv % 2:
                prod = -prod
        total += prod
        if abs(prod) >= ACC_LIMIT or abs(total) >= ACC_LIMIT:
            raise AccumulatorOverflowError(
                "permutation sum left the signed 128-bit accumulator range",
                bound=ACC_LIMIT,
            )
    return total


def per_naive(M: IntMatrix) -> int:
    """Permanent by direct permutation sum; oracle for side <= 10."""
    side = _side(M)
    if side > NAIVE_MAX_SIDE:
        raise ContractError(
            f"per_naive enumerates side! permutations and is capped at "
            f"side {NAIVE_MAX_SIDE}, got {side}"
        )
    return _signed_perm_sum(M, side, signed=False)


def det_naive(M: IntMatrix) -> int:
    """Determinant by signed permutation sum; oracle for side <= 10."""
    side = _side(M)
    if side > NAIVE_MAX_SIDE:
        raise ContractError(
            f"det_naive enumerates side! permutations and is capped at "
            f"side {NAIVE_MAX_SIDE}, got {side}"
        )
    return _signed_perm_sum(M, side, signed=True)


def _per_ryser_bigint(M: IntMatrix, side: int) -> int:
    cols = [M.col(j) for j in range(1, side + 1)]
    rowsums = [0] * side
    acc = 0
    gray = 0
    pc = 0
    for k in range(1, 1 << side):
        bit = k & -k
        j = bit.bit_length() - 1
        gray ^= bit
        cj = cols[j]
        if gray & bit:
            for i in range(side):
                rowsums[i] += cj[i]
            pc += 1
        else:
            for i in range(side):
                rowsums[i] -= cj[i]
            pc -= 1
        prod = 1
        for v in rowsums:
            prod *= v
        if (side - pc) & 1:
            acc -= prod
        else:
            acc += prod
        if abs(prod) >= ACC_LIMIT or abs(acc) >= ACC_LIMIT:
            raise AccumulatorOverflowError(
                f"accumulator left the signed 128-bit range at subset index {k} "
                f"(Gray order)",
                bound=ACC_LIMIT,
            )
    return acc


def per_ryser(M: IntMatrix) -> int:
    """Permanent by Gray-code inclusion-exclusion over column subsets.

    Each of the ``2**side - 1`` subsets updates one column's worth of
    row sums, so the cost is O(2**side * side).  Certified-int64 inputs
    go through the batched kernel; everything else runs exactly in
    Python integers with per-subset overflow detection.
    """
    side = _side(M)
    if side > RYSER_MAX_SIDE:
        raise AccumulatorOverflowError(
            f"side {side} exceeds the certified accumulator bound "
            f"(side <= {RYSER_MAX_SIDE})",
            bound=ACC_LIMIT,
        )
    if side == 0:
        return 1
    if _kernels.ryser_fits_int64(side, M.max_abs()):
        return int(_kernels.ryser_batch(M.to_array()[None, :, :])[0])
    return _per_ryser_bigint(M, side)


def complement_submatrix(A: IntMatrix, I: ColumnSet) -> IntMatrix:
    """A[-I]: first ``universe - |I|`` rows, columns outside ``I``."""
    if I.universe != A.cols:
        raise ContractError(
            f"column universe {I.universe} does not match matrix with {A.cols} columns"
        )
    keep = I.complement().members
    m = len(keep)
    if m > A.rows:
        raise ContractError(f"need {m} rows for the complement, matrix has {A.rows}")
    return IntMatrix.from_rows(
        [tuple(A.entry(r, j) for j in keep) for r in range(1, m + 1)]
    )


def upper_rows(A: IntMatrix, s: int) -> IntMatrix:
    """First ``rows - s`` rows of ``A`` (all columns)."""
    if not 1 <= s <= A.rows:
        raise ContractError(f"s must be in 1..{A.rows}, got {s}")
    return IntMatrix.from_rows([A.row(i) for i in range(1, A.rows - s + 1)])


def minor_expansion(A: IntMatrix, J: ColumnSet) -> list:
    """Coefficients expanding per(A[-J]) along its last row.

    Returns ascending pairs ``(i, per(A[-(J+i)]))`` over columns ``i``
    outside ``J``; dotting with the entries of row ``side - |J|`` at
    those columns reproduces per(A[-J]).
    """
    side = _side(A)
    if J.universe != side:
        raise ContractError(
            f"column universe {J.universe} does not match side {side}"
        )
    s = len(J)
    if s >= side:
        raise ContractError("expansion needs at least one remaining row")
    return [
        (i, per_ryser(complement_submatrix(A, J.plus(i))))
        for i in J.complement()
    ]


def parse_matrix(text: str) -> IntMatrix:
    """Read the plain-text format: ``rows cols`` then row-major entries."""
    tokens = text.replace("\u2212", "-").split()
    if len(tokens) < 2:
        raise ParseError("matrix text needs a 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise ParseError(f"bad matrix header {tokens[:2]}") from exc
    if rows < 0 or cols < 0:
        raise ParseError(f"negative shape {rows}x{cols}")
    body = tokens[2:]
    if len(body) != rows * cols:
        raise ParseError(
            f"expected {rows * cols} entries for {rows}x{cols}, got {len(body)}"
        )
    try:
        entries = tuple(int(t) for t in body)
    except ValueError as exc:
        raise ParseError("matrix entries must be ASCII integers") from exc
    return IntMatrix(rows, cols, entries)


def format_matrix(M: IntMatrix) -> str:
    lines = [f"{M.rows} {M.cols}"]
    for i in range(1, M.rows + 1):
        lines.append(" ".join(str(e) for e in M.row(i)))
    return "\n".join(lines) + "\n"


def read_matrix(path) -> IntMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def write_matrix(path, M: IntMatrix) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_matrix(M))
