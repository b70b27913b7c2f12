"""Backend selection for the hot kernels.

The enumeration and Monte Carlo inner loops exist twice: a numba
``@njit`` version and a vectorized pure-numpy version with identical
integer semantics.  The numba path is used when numba imports cleanly
and the environment variable ``PERMLAB_NO_NUMBA`` is unset; setting
``PERMLAB_NO_NUMBA=1`` forces the numpy fallback (the benchmark in
``benchmarks/bench_kernels.py`` compares the two).
"""

import os
import warnings


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


NUMBA_DISABLED = _env_flag("PERMLAB_NO_NUMBA")

if NUMBA_DISABLED:
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        HAVE_NUMBA = False
        warnings.warn(
            "numba is not importable; permlab falls back to the pure-numpy "
            "kernels (slower, same results)",
            stacklevel=2,
        )

USE_NUMBA = HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise."""
    if USE_NUMBA:
        import numba

        return numba.njit(*args, **kwargs)

    def decorate(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return decorate
