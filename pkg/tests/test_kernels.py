import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import brute_per
from permlab import _accel, _kernels
from permlab.matrices import IntMatrix, per_ryser


class TestRyserBatch:
    def test_matches_oracle_on_random_batch(self, gen):
        for side in range(1, 7):
            mats = gen.integers(-3, 4, size=(40, side, side)).astype(np.int64)
            got = _kernels.ryser_batch(mats)
            want = [brute_per(m.tolist()) for m in mats]
            assert got.tolist() == want

    def test_numpy_and_njit_agree(self, gen):
        mats = gen.integers(-5, 6, size=(64, 7, 7)).astype(np.int64)
        a = _kernels.ryser_batch_numpy(mats)
        b = _kernels.ryser_batch_njit(mats)
        assert np.array_equal(a, b)

    def test_empty_batch(self):
        out = _kernels.ryser_batch(np.zeros((0, 3, 3), dtype=np.int64))
        assert out.shape == (0,)

    def test_side_one(self):
        mats = np.array([[[5]], [[-2]]], dtype=np.int64)
        assert _kernels.ryser_batch(mats).tolist() == [5, -2]


class TestInt64Certificate:
    def test_certified_sizes_do_not_overflow(self):
        # The certificate bounds the worst Gray-code accumulator, so a
        # certified (side, max_abs) evaluated at its extreme still fits.
        for side in range(1, 12):
            for max_abs in (1, 2, 3, 10):
                if not _kernels.ryser_fits_int64(side, max_abs):
                    continue
                worst = IntMatrix.from_rows([[max_abs] * side] * side)
                batch = _kernels.ryser_batch(worst.to_array()[None, :, :])
                assert int(batch[0]) == per_ryser(worst)

    def test_large_inputs_are_rejected(self):
        assert not _kernels.ryser_fits_int64(20, 10**6)
        assert not _kernels.ryser_fits_int64(34, 1)

    def test_zero_max_abs(self):
        assert _kernels.ryser_fits_int64(5, 0)


class TestCodecs:
    def test_mixed_radix_round_trip(self):
        values = (-1, 1)
        n = 3
        codes = np.arange(2 ** (n * n), dtype=np.int64)
        mats = _kernels.decode_matrices(codes, n, values)
        assert mats.shape == (512, 3, 3)
        # all matrices distinct and entries drawn from the alphabet
        assert len({m.tobytes() for m in mats}) == 512
        assert set(np.unique(mats)) == {-1, 1}

    def test_mixed_radix_table_shape(self):
        table = _kernels.mixed_radix_table((0, 1, 2), 4)
        assert table.shape[1] == 4
        assert table.shape[0] == 3**4


class TestNumbaToggle:
    def test_flag_reflects_environment(self):
        expected = os.environ.get("PERMLAB_NO_NUMBA", "") not in ("", "0")
        assert _accel.NUMBA_DISABLED == expected

    def test_fallback_produces_identical_output(self, gen):
        mats = gen.integers(-3, 4, size=(32, 6, 6)).astype(np.int64)
        want = _kernels.ryser_batch(mats).tolist()
        code = (
            "import sys, numpy as np; from permlab import _kernels, _accel; "
            "assert not _accel.USE_NUMBA; "
            "mats = np.frombuffer(sys.stdin.buffer.read(), dtype=np.int64)"
            ".reshape(32, 6, 6); "
            "print(_kernels.ryser_batch(mats).tolist())"
        )
        env = dict(os.environ, PERMLAB_NO_NUMBA="1")
        proc = subprocess.run(
            [sys.executable, "-c", code],
            input=mats.tobytes(),
            capture_output=True,
            env=env,
            check=True,
        )
        assert proc.stdout.decode().strip() == str(want)
