"""Chunked execution with a worker-independent split.

Work is cut into fixed-size chunks up front and results are merged in
chunk order, so the output of any enumeration or Monte Carlo run is
byte-identical whether it ran on 1 thread or 8.  Thread-based
parallelism is enough here because the hot kernels either release the
GIL (numba ``nogil``) or spend their time inside numpy.
"""

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ContractError

CHUNK = 1 << 14


def worker_count(requested=None) -> int:
    """Effective worker count: ``PERMLAB_WORKERS`` beats the argument."""
    env = os.environ.get("PERMLAB_WORKERS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ContractError(f"PERMLAB_WORKERS must be an integer, got {env!r}") from None
    elif requested is not None:
        value = requested
    else:
        value = 1
    if value < 1:
        raise ContractError(f"worker count must be >= 1, got {value}")
    return value


def run_chunks(total: int, fn, workers: int = 1, chunk: int = CHUNK) -> list:
    """Apply ``fn(start, stop, chunk_index)`` over ``range(0, total)``.

    Returns the per-chunk results in chunk order regardless of which
    worker finished first.
    """
    if total < 0:
        raise ContractError(f"total must be >= 0, got {total}")
    spans = [(s, min(s + chunk, total), i) for i, s in enumerate(range(0, total, chunk))]
    if workers <= 1 or len(spans) <= 1:
        return [fn(*span) for span in spans]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda span: fn(*span), spans))
