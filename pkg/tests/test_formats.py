import io

import numpy as np
import pytest

from tenzo.core import DenseTensor, unfold
from tenzo.formats import (
    CPTensor,
    TTTensor,
    TuckerTensor,
    hosvd,
    load_tt,
    load_tucker,
    numerical_rank,
    reconstruct,
    save_tt,
    save_tucker,
    storage_count,
    tt_svd,
)


def rank_one(rng, extents):
    vecs = [rng.standard_normal(n) for n in extents]
    letters = "ijk"[: len(extents)]
    spec = ",".join(letters) + "->" + letters
    return DenseTensor(np.einsum(spec, *vecs)), vecs


def sample_grid(f, n):
    x = np.linspace(-1.0, 1.0, n)
    gx, gy, gz = np.meshgrid(x, x, x, indexing="ij")
    return DenseTensor(f(gx, gy, gz))


def rel_err(x, y):
    return np.linalg.norm((x.data - y.data).ravel()) / np.linalg.norm(y.data.ravel())


class TestTTSVD:
    def test_rank_one(self):
        x, _ = rank_one(np.random.default_rng(0), (4, 5, 6))
        tt = tt_svd(x, 1e-8)
        assert tt.rank_vector == (1, 1, 1, 1)

    def test_algebraic_example_ranks(self):
        x = sample_grid(lambda a, b, c: 1.0 + np.tan(a) * b + b**2 * c**3, 20)
        tt = tt_svd(x, 1e-12)
        assert all(s <= b for s, b in zip(tt.rank_vector, (1, 2, 2, 1)))
        assert rel_err(reconstruct(tt), x) <= 1e-12

    def test_random_full_rank(self):
        rng = np.random.default_rng(1)
        x = DenseTensor(rng.standard_normal((6, 6, 6)))
        tt = tt_svd(x, 1e-15)
        assert rel_err(reconstruct(tt), x) <= 1e-13
        assert all(s <= b for s, b in zip(tt.rank_vector, (1, 6, 6, 1)))

    def test_eps_validation(self):
        x = DenseTensor(np.ones((2, 2)))
        for bad in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ValueError):
                tt_svd(x, bad)

    def test_error_contract_random(self):
        rng = np.random.default_rng(2)
        for trial in range(200):
            x = DenseTensor(rng.standard_normal((5, 6, 7)))
            for eps in (1e-1, 1e-4, 1e-8):
                tt = tt_svd(x, eps)
                assert rel_err(reconstruct(tt), x) <= eps

    def test_rank_monotonicity(self):
        x = sample_grid(lambda a, b, c: np.cos(a + b + c) + 0.1 * np.exp(a * b * c), 12)
        r_tight = tt_svd(x, 1e-10).rank_vector
        r_loose = tt_svd(x, 1e-2).rank_vector
        assert all(t >= l for t, l in zip(r_tight, r_loose))

    def test_ranks_bounded_by_unfolding_ranks(self):
        rng = np.random.default_rng(3)
        # low-rank-by-construction tensor
        g = rng.standard_normal((2, 3, 2))
        a = rng.standard_normal((7, 2))
        b = rng.standard_normal((6, 3))
        c = rng.standard_normal((5, 2))
        x = DenseTensor(np.einsum("pqr,ip,jq,kr->ijk", g, a, b, c))
        tt = tt_svd(x, 1e-15)
        for k in (1, 2):
            m = unfold(x, k).data
            s = np.linalg.svd(m, compute_uv=False)
            mr = int(np.sum(s > 1e-12 * s[0]))
            assert tt.rank_vector[k] <= mr

    def test_zero_tensor(self):
        tt = tt_svd(DenseTensor(np.zeros((3, 3, 3))), 1e-8)
        assert reconstruct(tt).norm() == 0.0

    def test_complex_oscillatory(self):
        x = sample_grid(lambda a, b, c: np.exp(1j * np.pi * a * b * c), 12)
        tt = tt_svd(x, 1e-10)
        assert rel_err(reconstruct(tt), x) <= 1e-10


class TestHOSVD:
    def test_rank_one(self):
        x, _ = rank_one(np.random.default_rng(4), (4, 5, 6))
        tk = hosvd(x, 1e-8)
        assert tk.rank_vector == (1, 1, 1)

    def test_algebraic_example_multilinear_ranks(self):
        x = sample_grid(lambda a, b, c: 1.0 + np.tan(a) * b + b**2 * c**3, 20)
        tk = hosvd(x, 1e-12)
        assert all(t <= b for t, b in zip(tk.rank_vector, (2, 3, 2)))
        # consistent with the p_ml <= 7n + 12 storage count at these ranks
        assert tk.storage_count() <= 20 * (2 + 3 + 2) + 2 * 3 * 2

    def test_error_contract_random(self):
        rng = np.random.default_rng(5)
        for trial in range(200):
            x = DenseTensor(rng.standard_normal((5, 6, 7)))
            for eps in (1e-1, 1e-4, 1e-8):
                tk = hosvd(x, eps)
                assert rel_err(reconstruct(tk), x) <= eps

    def test_factor_orthonormality(self):
        rng = np.random.default_rng(6)
        x = DenseTensor(rng.standard_normal((6, 5, 4)))
        tk = hosvd(x, 1e-6)
        for a in tk.factors:
            gram = a.conj().T @ a
            assert np.max(np.abs(gram - np.eye(a.shape[1]))) <= 1e-12

    def test_t1_matches_tt_s1(self):
        rng = np.random.default_rng(7)
        x = DenseTensor(rng.standard_normal((5, 6, 7)))
        x = DenseTensor(x.data + 1.0)  # mild structure
        assert hosvd(x, 1e-15).rank_vector[0] == tt_svd(x, 1e-15).rank_vector[1]


class TestReconstructAndStorage:
    def test_tt_from_vector_slices(self):
        rng = np.random.default_rng(8)
        u, v, w = rng.standard_normal(3), rng.standard_normal(4), rng.standard_normal(5)
        tt = TTTensor(
            (
                u.reshape(1, 3, 1),
                v.reshape(1, 4, 1),
                w.reshape(1, 5, 1),
            )
        )
        assert np.allclose(
            reconstruct(tt).data, np.einsum("i,j,k->ijk", u, v, w), atol=1e-14
        )
        assert tt.storage_count() == 3 + 4 + 5

    def test_tucker_identity_factors(self):
        rng = np.random.default_rng(9)
        core = DenseTensor(rng.standard_normal((3, 4, 2)))
        tk = TuckerTensor(core, (np.eye(3), np.eye(4), np.eye(2)))
        assert reconstruct(tk).allclose(core)
        assert tk.storage_count() == 9 + 16 + 4 + 24

    def test_tucker_orthonormality_enforced(self):
        core = DenseTensor(np.ones((2, 2, 2)))
        bad = np.array([[1.0, 0.0], [1.0, 1.0]])
        with pytest.raises(ValueError):
            TuckerTensor(core, (bad, np.eye(2), np.eye(2)))

    def test_cp_against_loop_oracle(self):
        rng = np.random.default_rng(10)
        weights = rng.standard_normal(2)
        factors = tuple(rng.standard_normal((3, 2)) for _ in range(3))
        cp = CPTensor(weights, factors)
        dense = reconstruct(cp)
        expect = np.zeros((3, 3, 3))
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    for t in range(2):
                        expect[i, j, k] += (
                            weights[t]
                            * factors[0][i, t]
                            * factors[1][j, t]
                            * factors[2][k, t]
                        )
        assert np.allclose(dense.data, expect, atol=1e-14)
        assert cp.storage_count() == 2 + 2 * 9
        assert storage_count(cp) == cp.storage_count()

    def test_reconstruct_cap(self):
        tt = TTTensor(tuple(np.ones((1, 50, 1)) for _ in range(3)))
        with pytest.raises(ValueError):
            reconstruct(tt, cap=1000)

    def test_kruskal_bound_by_construction(self):
        # a CP tensor whose factor matrices have ranks (r1, r2, r3) admits a
        # representation with min_j prod(r)/r_j terms; build it explicitly
        rng = np.random.default_rng(11)
        n, terms = 6, 8
        ranks = (2, 3, 2)
        bs = [rng.standard_normal((n, r)) for r in ranks]
        cs = [rng.standard_normal((terms, r)) for r in ranks]
        factors = tuple(b @ c.T for b, c in zip(bs, cs))
        x = reconstruct(CPTensor(np.ones(terms), factors))

        core = np.einsum("ta,tb,tc->abc", *cs)
        kruskal = min(int(np.prod(ranks)) // r for r in ranks)  # = 4 here
        # group the two non-maximal modes: one term per (a, c) pair
        grouped_w = []
        grouped = ([], [], [])
        for a in range(ranks[0]):
            for c in range(ranks[2]):
                grouped_w.append(1.0)
                grouped[0].append(bs[0][:, a])
                grouped[1].append(bs[1] @ core[a, :, c])
                grouped[2].append(bs[2][:, c])
        cp_small = CPTensor(
            np.array(grouped_w), tuple(np.column_stack(g) for g in grouped)
        )
        assert cp_small.rank == kruskal
        assert np.allclose(reconstruct(cp_small).data, x.data, atol=1e-10)


class TestNumericalRank:
    def test_exact_rank_two(self):
        rng = np.random.default_rng(12)
        m = np.outer(rng.standard_normal(6), rng.standard_normal(8))
        m = m + np.outer(rng.standard_normal(6), rng.standard_normal(8))
        assert numerical_rank(m, 0.0) == 2

    def test_identity_tail(self):
        assert numerical_rank(np.eye(5), 1.1) == 4

    def test_delta_above_norm(self):
        rng = np.random.default_rng(13)
        m = rng.standard_normal((4, 7))
        assert numerical_rank(m, np.linalg.norm(m) * 1.0000001) == 0

    def test_accepts_unfolding(self):
        x = DenseTensor(np.ones((3, 3, 3)))
        assert numerical_rank(unfold(x, 1), 1e-10) == 1

    def test_negative_delta(self):
        with pytest.raises(ValueError):
            numerical_rank(np.eye(2), -1.0)


class TestSerialization:
    def test_tt_roundtrip_bitexact(self):
        rng = np.random.default_rng(14)
        tt = tt_svd(DenseTensor(rng.standard_normal((4, 5, 6))), 1e-10)
        buf = io.BytesIO()
        save_tt(tt, buf)
        buf.seek(0)
        back = load_tt(buf)
        assert back.rank_vector == tt.rank_vector
        for c1, c2 in zip(tt.cores, back.cores):
            assert np.array_equal(c1, c2)

    def test_tt_complex_roundtrip(self, tmp_path):
        rng = np.random.default_rng(15)
        data = rng.standard_normal((3, 4, 3)) + 1j * rng.standard_normal((3, 4, 3))
        tt = tt_svd(DenseTensor(data), 1e-12)
        path = tmp_path / "t.ttz"
        save_tt(tt, path)
        back = load_tt(path)
        for c1, c2 in zip(tt.cores, back.cores):
            assert np.array_equal(c1, c2)

    def test_tucker_roundtrip(self, tmp_path):
        rng = np.random.default_rng(16)
        tk = hosvd(DenseTensor(rng.standard_normal((4, 5, 6))), 1e-8)
        path = tmp_path / "t.ttz"
        save_tucker(tk, path)
        back = load_tucker(path)
        assert np.array_equal(back.core.data, tk.core.data)
        for a1, a2 in zip(tk.factors, back.factors):
            assert np.array_equal(a1, a2)

    def test_magic_enforced(self):
        with pytest.raises(ValueError):
            load_tt(io.BytesIO(b"NOPE" + b"\x00" * 32))

    def test_format_tag_enforced(self, tmp_path):
        rng = np.random.default_rng(17)
        tt = tt_svd(DenseTensor(rng.standard_normal((3, 3, 3))), 1e-8)
        path = tmp_path / "t.ttz"
        save_tt(tt, path)
        with pytest.raises(ValueError):
            load_tucker(path)
