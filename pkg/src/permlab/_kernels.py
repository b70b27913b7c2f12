"""Batched integer kernels for permanent enumeration.

Every kernel exists in two variants with identical semantics: a numba
``@njit`` build and a vectorized numpy build.  ``ryser_batch`` points at
whichever backend :mod:`permlab._accel` selected.  All kernels work on
int64 and never check for overflow; callers certify safety through
:func:`ryser_fits_int64` before dispatching, and route anything larger
through the exact big-int path in :mod:`permlab.matrices`.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

INT64_LIMIT = 1 << 63


def ryser_fits_int64(side: int, max_abs: int) -> bool:
    """True when no intermediate of the batched kernel can leave int64.

    The Gray-code accumulation over a ``side x side`` matrix with entries
    bounded by ``max_abs`` keeps every row sum within ``side * max_abs``,
    every product within ``(side * max_abs) ** side`` and the running
    total within ``2**side`` times that, all in exact arithmetic here.
    """
    if side == 0:
        return True
    return (1 << side) * (side * max_abs) ** side < INT64_LIMIT


def ryser_batch_numpy(mats: np.ndarray) -> np.ndarray:
    """Permanents of a batch of square int64 matrices, shape (B, n, n).

    Gray-code form of the Ryser inclusion-exclusion: one column toggles
    per step, so each of the ``2**n - 1`` subsets costs O(B*n).
    """
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    bsz, n, n2 = mats.shape
    if n != n2:
        raise ValueError("matrices must be square")
    if n == 0:
        return np.ones(bsz, dtype=np.int64)
    rowsums = np.zeros((bsz, n), dtype=np.int64)
    acc = np.zeros(bsz, dtype=np.int64)
    gray = 0
    pc = 0
    for k in range(1, 1 << n):
        bit = k & -k
        j = bit.bit_length() - 1
        gray ^= bit
        if gray & bit:
            rowsums += mats[:, :, j]
            pc += 1
        else:
            rowsums -= mats[:, :, j]
            pc -= 1
        prod = rowsums.prod(axis=1)
        if (n - pc) & 1:
            acc -= prod
        else:
            acc += prod
    return acc


@njit(cache=True, nogil=True)
def _ryser_batch_jit(mats, out):  # pragma: no cover - measured via dispatch
    bsz, n, _ = mats.shape
    for b in range(bsz):
        rowsums = np.zeros(n, dtype=np.int64)
        acc = np.int64(0)
        gray = 0
        pc = 0
        for k in range(1, 1 << n):
            bit = k & -k
            j = 0
            t = bit >> 1
            while t:
                t >>= 1
                j += 1
            gray ^= bit
            if gray & bit:
                for i in range(n):
                    rowsums[i] += mats[b, i, j]
                pc += 1
            else:
                for i in range(n):
                    rowsums[i] -= mats[b, i, j]
                pc -= 1
            prod = np.int64(1)
            for i in range(n):
                prod *= rowsums[i]
            if (n - pc) & 1:
                acc -= prod
            else:
                acc += prod
        out[b] = acc
    return out


def ryser_batch_njit(mats: np.ndarray) -> np.ndarray:
    """numba backend of :func:`ryser_batch_numpy`; same contract."""
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    bsz, n, n2 = mats.shape
    if n != n2:
        raise ValueError("matrices must be square")
    if n == 0:
        return np.ones(bsz, dtype=np.int64)
    out = np.empty(bsz, dtype=np.int64)
    _ryser_batch_jit(mats, out)
    return out


if USE_NUMBA:
    ryser_batch = ryser_batch_njit
else:
    ryser_batch = ryser_batch_numpy
    ryser_batch_njit = None  # noqa: F811 - flags the backend as unavailable


def mixed_radix_table(values, width: int) -> np.ndarray:
    """All length-``width`` tuples over ``values`` as an int64 array.

    Row ``c`` decodes ``c`` in base ``len(values)`` with digit 0 the
    least significant, so row 0 is all ``values[0]`` and rows follow
    counting order.  Shape ``(len(values)**width, width)``.
    """
    vals = np.asarray(sorted(values), dtype=np.int64)
    base = len(vals)
    count = base**width
    out = np.empty((count, width), dtype=np.int64)
    codes = np.arange(count, dtype=np.int64)
    for pos in range(width):
        out[:, pos] = vals[codes % base]
        codes //= base
    return out


def decode_matrices(codes: np.ndarray, n: int, values) -> np.ndarray:
    """Decode entry codes to (B, n, n) matrices over the given alphabet.

    Code digit ``i * n + j`` (least significant first) selects the entry
    at row ``i``, column ``j`` from ``sorted(values)``.
    """
    vals = np.asarray(sorted(values), dtype=np.int64)
    base = len(vals)
    codes = np.asarray(codes, dtype=np.int64).copy()
    bsz = codes.shape[0]
    out = np.empty((bsz, n, n), dtype=np.int64)
    for pos in range(n * n):
        i, j = divmod(pos, n)
        out[:, i, j] = vals[codes % base]
        codes //= base
    return out
