"""Compare the two ryser_batch backends on identical random batches.

The numba build and the vectorized numpy build compute the same int64
permanents; this script times both (when both are importable), checks
they agree, and prints one table row per matrix side.

    python3 benchmarks/bench_kernels.py --sides 3,5,7,8 --batch 4096

Run with PERMLAB_NO_NUMBA=1 to confirm the numpy path alone.
"""

import argparse
import sys
from time import perf_counter

import numpy as np

from permlab._accel import USE_NUMBA
from permlab._kernels import ryser_batch_njit, ryser_batch_numpy, ryser_fits_int64


def time_backend(fn, mats: np.ndarray, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = perf_counter()
        fn(mats)
        best = min(best, perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sides", default="3,4,5,6,7,8")
    parser.add_argument("--batch", type=int, default=4096)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--max-abs", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    sides = [int(s) for s in args.sides.split(",")]
    gen = np.random.default_rng(args.seed)
    have_jit = USE_NUMBA and ryser_batch_njit is not None
    if have_jit:
        ryser_batch_njit(gen.integers(-1, 2, size=(2, 3, 3)))  # compile pass
    else:
        print("numba backend unavailable; timing numpy only", file=sys.stderr)

    header = f"{'side':>4} {'batch':>7} {'numpy_s':>9}"
    if have_jit:
        header += f" {'njit_s':>9} {'speedup':>8}"
    print(header)
    for side in sides:
        if not ryser_fits_int64(side, args.max_abs):
            print(f"{side:>4} skipped: entries exceed the int64 certificate")
            continue
        mats = gen.integers(-args.max_abs, args.max_abs + 1,
                            size=(args.batch, side, side))
        t_np = time_backend(ryser_batch_numpy, mats, args.repeats)
        row = f"{side:>4} {args.batch:>7} {t_np:>9.4f}"
        if have_jit:
            if not np.array_equal(ryser_batch_njit(mats), ryser_batch_numpy(mats)):
                print(f"{side:>4} BACKEND MISMATCH", file=sys.stderr)
                return 1
            t_jit = time_backend(ryser_batch_njit, mats, args.repeats)
            row += f" {t_jit:>9.4f} {t_np / t_jit:>8.2f}"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
