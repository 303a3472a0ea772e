import numpy as np
import pytest

from qecauth import kernels
from qecauth._bits import pack_bit_rows, unpack_bit_rows


def both_backends():
    return [kernels.get_backend(n) for n in kernels.available_backends()]


needs_ext = pytest.mark.skipif(
    len(kernels.available_backends()) < 2, reason="compiled extension not built"
)


class TestGrayWeightCounts:
    def test_against_direct_enumeration(self):
        rng = np.random.default_rng(0)
        basis = [int(x) for x in rng.integers(0, 1 << 16, size=9)]
        counts = kernels.gray_weight_counts(basis, 16)
        brute = np.zeros(17, dtype=np.int64)
        for r in range(1 << 9):
            cw = 0
            for j in range(9):
                if (r >> j) & 1:
                    cw ^= basis[j]
            brute[cw.bit_count()] += 1
        assert np.array_equal(counts, brute)

    def test_coset_offset(self):
        rng = np.random.default_rng(1)
        basis = [int(x) for x in rng.integers(0, 1 << 12, size=6)]
        init = int(rng.integers(0, 1 << 12))
        counts = kernels.gray_weight_counts(basis, 12, init)
        brute = np.zeros(13, dtype=np.int64)
        for r in range(1 << 6):
            cw = init
            for j in range(6):
                if (r >> j) & 1:
                    cw ^= basis[j]
            brute[cw.bit_count()] += 1
        assert np.array_equal(counts, brute)

    def test_totals(self):
        counts = kernels.gray_weight_counts([0b101, 0b011], 3)
        assert counts.sum() == 4
        assert counts[0] == 1

    def test_wide_blocks_use_bigint_path(self):
        # block length beyond one machine word
        basis = [(1 << 80) | 1, (1 << 79) | 2]
        counts = kernels.gray_weight_counts(basis, 81)
        assert counts.sum() == 4
        assert counts[0] == 1 and counts[2] == 2 and counts[4] == 1

    @needs_ext
    def test_backend_equivalence(self):
        rng = np.random.default_rng(2)
        basis = [int(x) for x in rng.integers(0, 1 << 33, size=14)]
        a, b = [
            kernels.gray_weight_counts(basis, 33, 7, backend=be) for be in both_backends()
        ]
        assert np.array_equal(a, b)


class TestParityMatvec:
    def test_against_matmul(self):
        rng = np.random.default_rng(3)
        rows_bits = rng.integers(0, 2, size=(50, 130), dtype=np.uint8)
        vec_bits = rng.integers(0, 2, size=(300, 130), dtype=np.uint8)
        out = kernels.parity_matvec(pack_bit_rows(rows_bits, 130), pack_bit_rows(vec_bits, 130))
        ref = (vec_bits.astype(np.int64) @ rows_bits.T.astype(np.int64)) % 2
        assert np.array_equal(out, ref.astype(np.uint8))

    @needs_ext
    def test_backend_equivalence(self):
        rng = np.random.default_rng(4)
        rows = rng.integers(0, 1 << 60, size=(30, 2), dtype=np.uint64)
        vecs = rng.integers(0, 1 << 60, size=(500, 2), dtype=np.uint64)
        a, b = [kernels.parity_matvec(rows, vecs, backend=be) for be in both_backends()]
        assert np.array_equal(a, b)


class TestPacking:
    def test_round_trip(self):
        rng = np.random.default_rng(5)
        for nbits in (1, 7, 64, 65, 130):
            bits = rng.integers(0, 2, size=(20, nbits), dtype=np.uint8)
            assert np.array_equal(unpack_bit_rows(pack_bit_rows(bits, nbits), nbits), bits)


def omega(n):
    om = np.zeros((2 * n, 2 * n), dtype=np.int64)
    om[:n, n:] = np.eye(n, dtype=np.int64)
    om[n:, :n] = np.eye(n, dtype=np.int64)
    return om


class TestSymplecticSampling:
    @pytest.mark.parametrize("n", [1, 2, 3, 7])
    def test_samples_are_symplectic(self, n):
        mats = kernels.sample_symplectic_batch(n, 200, np.random.default_rng(6))
        om = omega(n)
        for m in mats.astype(np.int64):
            assert np.array_equal((m.T @ om @ m) % 2, om)

    def test_determinism(self):
        a = kernels.sample_symplectic_batch(4, 50, np.random.default_rng(7))
        b = kernels.sample_symplectic_batch(4, 50, np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_full_group_coverage_n1(self):
        # |Sp(2,2)| = 6; a modest sample must reach every element
        mats = kernels.sample_symplectic_batch(1, 500, np.random.default_rng(8))
        assert len({m.tobytes() for m in mats}) == 6

    def test_full_group_coverage_n2(self):
        mats = kernels.sample_symplectic_batch(2, 30_000, np.random.default_rng(9))
        assert len({m.tobytes() for m in mats}) == 720

    def test_transvection_recomposition(self):
        # the recorded transvections must compose to the sampled matrix
        from qecauth._bits import parity

        def apply_transvection(h, v, n):
            ax, az = h & ((1 << n) - 1), h >> n
            bx, bz = v & ((1 << n) - 1), v >> n
            if parity(ax & bz) ^ parity(bx & az):
                return v ^ h
            return v

        for n in (1, 3, 5):
            rng = np.random.default_rng(10 + n)
            ks = np.empty((10, n), dtype=np.int64)
            for j in range(1, n + 1):
                ks[:, j - 1] = rng.integers(1, 1 << (2 * j), size=10, dtype=np.int64)
            bits = rng.integers(0, 2, size=(10, n * n), dtype=np.uint8)
            ds = kernels.get_backend("python").symplectic_batch_ds(n, ks, bits)
            sigma = kernels._ds_to_std_index(n)
            for b in range(10):
                tmp = np.zeros_like(ds[b])
                tmp[sigma[:, None], sigma[None, :]] = ds[b]
                m_std = tmp.T
                trans = kernels.transvections_for_sample(n, ks[b], bits[b])
                for col in range(2 * n):
                    v = 1 << col
                    for h in trans:
                        v = apply_transvection(h, v, n)
                    claimed = int("".join(str(x) for x in m_std[::-1, col]), 2)
                    assert v == claimed

    @needs_ext
    def test_backend_equivalence(self):
        a = kernels.sample_symplectic_batch(
            5, 100, np.random.default_rng(11), backend=kernels.get_backend("cython")
        )
        b = kernels.sample_symplectic_batch(
            5, 100, np.random.default_rng(11), backend=kernels.get_backend("python")
        )
        assert np.array_equal(a, b)

    def test_range_guard(self):
        with pytest.raises(ValueError):
            kernels.sample_symplectic_batch(17, 1, np.random.default_rng(0))
