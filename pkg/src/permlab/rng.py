"""Counter-based randomness.

All sampling in permlab derives from one user seed through Philox
counter jumps.  Stream ``index`` owns the counter block starting at
``index * 2**128``, so any two indices yield independent generators and
results never depend on how work is split across workers: whoever needs
the ``i``-th block asks for ``substream(seed, i)`` and gets the same
bytes every time.
"""

import numpy as np

from .errors import ContractError

KEY_BITS = 128

# Number of samples a Monte Carlo worker draws per stream index.  Fixed
# independently of worker count so that sample i always comes from
# stream i // DRAW_BLOCK at offset i % DRAW_BLOCK.
DRAW_BLOCK = 1 << 14


def substream(seed: int, index: int) -> np.random.Generator:
    """Generator for counter block ``index`` of the keyed Philox stream."""
    if not 0 <= seed < (1 << KEY_BITS):
        raise ContractError(f"seed must be in [0, 2**{KEY_BITS}), got {seed}")
    if not 0 <= index < (1 << KEY_BITS):
        raise ContractError(f"stream index must be in [0, 2**{KEY_BITS})")
    bitgen = np.random.Philox(key=seed, counter=index << KEY_BITS)
    return np.random.Generator(bitgen)


def draw_uniform_numerators(gen: np.random.Generator, denominator: int, size: int) -> np.ndarray:
    """Uniform draws from ``{0, ..., denominator - 1}`` as int64.

    This is the primitive behind exact finite-distribution sampling:
    with atom probabilities ``n_i / denominator`` the draw is compared
    against cumulative numerators, so atom frequencies are exactly
    proportional to the ``n_i`` with no float rounding anywhere.
    """
    if not 1 <= denominator < (1 << 63):
        raise ContractError(
            f"common denominator must fit a signed 64-bit draw, got {denominator}"
        )
    return gen.integers(0, denominator, size=size, dtype=np.int64)
