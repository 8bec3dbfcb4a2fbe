"""Representation similarity: CKA dual routes, SVCCA vs eigensolver oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xlign import PairedRepresentations, gram_cka, linear_cka, svcca
from xlign.repsim import _pca_basis

import oracles


def rand(n, d, seed):
    return np.random.default_rng(seed).standard_normal((n, d))


def pr(x, y):
    return PairedRepresentations(x, y)


def random_orthogonal(d, seed):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((d, d)))
    return q * np.sign(np.diag(r))


class TestPairedRepresentations:
    def test_row_mismatch_rejected(self):
        with pytest.raises(ValueError, match="row count mismatch"):
            pr(rand(10, 3, 0), rand(12, 3, 1))

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            pr(rand(1, 3, 0), rand(1, 3, 1))

    def test_non_finite_rejected(self):
        x = rand(10, 3, 0)
        y = rand(10, 3, 1)
        y[2, 1] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            pr(x, y)

    def test_one_dimensional_rejected(self):
        with pytest.raises(ValueError, match="2-D"):
            pr(np.ones(5), np.ones(5))

    def test_coerced_to_float64(self):
        p = pr(rand(5, 2, 0).astype(np.float32), rand(5, 2, 1).astype(np.float32))
        assert p.X.dtype == np.float64
        assert p.Y.dtype == np.float64


class TestLinearCKA:
    def test_self_similarity_is_one(self):
        x = rand(50, 8, 0)
        assert abs(linear_cka(pr(x, x)) - 1.0) <= 1e-10

    def test_symmetry(self):
        x, y = rand(40, 6, 1), rand(40, 9, 2)
        assert linear_cka(pr(x, y)) == pytest.approx(linear_cka(pr(y, x)), abs=1e-12)

    def test_isotropic_scaling_invariance(self):
        x, y = rand(30, 5, 3), rand(30, 7, 4)
        base = linear_cka(pr(x, y))
        assert abs(linear_cka(pr(2.5 * x, y)) - base) <= 1e-10
        assert abs(linear_cka(pr(x, -0.3 * y)) - base) <= 1e-10

    def test_orthogonal_invariance(self):
        x, y = rand(30, 6, 5), rand(30, 6, 6)
        base = linear_cka(pr(x, y))
        q = random_orthogonal(6, 7)
        assert abs(linear_cka(pr(x @ q, y)) - base) <= 1e-10
        assert abs(linear_cka(pr(x, y @ q)) - base) <= 1e-10

    def test_translation_invariance(self):
        x, y = rand(25, 4, 8), rand(25, 4, 9)
        base = linear_cka(pr(x, y))
        assert abs(linear_cka(pr(x + 3.0, y - 1.5)) - base) <= 1e-10

    def test_bounded(self):
        for seed in range(20):
            v = linear_cka(pr(rand(20, 5, seed), rand(20, 8, seed + 100)))
            assert 0.0 <= v <= 1.0

    def test_agrees_with_gram_route(self):
        for seed in range(100):
            n = 10 + seed % 30
            p = pr(rand(n, 3 + seed % 6, seed), rand(n, 4 + seed % 5, seed + 1000))
            assert abs(linear_cka(p) - gram_cka(p)) <= 1e-10

    def test_gram_route_matches_hsic_oracle(self):
        for seed in range(25):
            x, y = rand(24, 5, seed), rand(24, 7, seed + 500)
            assert gram_cka(pr(x, y)) == pytest.approx(
                oracles.hsic_cka(x, y), abs=1e-10
            )

    def test_constant_matrix_rejected(self):
        x = np.ones((20, 4))
        y = rand(20, 4, 0)
        with pytest.raises(ValueError, match="zero variance"):
            linear_cka(pr(x, y))
        with pytest.raises(ValueError, match="zero variance"):
            gram_cka(pr(y, x))


class TestPCABasis:
    def test_full_threshold_keeps_rank(self):
        q, k = _pca_basis(rand(30, 5, 0), 1.0, None)
        assert k == 5
        assert q.shape == (30, 5)
        assert np.allclose(q.T @ q, np.eye(5), atol=1e-10)

    def test_threshold_trims_low_variance(self):
        rng = np.random.default_rng(1)
        x = np.hstack([
            10.0 * rng.standard_normal((60, 2)),
            1e-3 * rng.standard_normal((60, 3)),
        ])
        _, k = _pca_basis(x, 0.99, None)
        assert k == 2

    def test_cap_applies(self):
        _, k = _pca_basis(rand(40, 8, 2), 1.0, 3)
        assert k == 3

    def test_matches_oracle_k(self):
        for seed in range(20):
            x = rand(25, 6, seed)
            _, k = _pca_basis(x, 0.9, None)
            assert k == oracles._pca_scores(x, 0.9, None)[1]

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            _pca_basis(np.zeros((10, 3)), 0.99, None)


class TestSVCCA:
    def test_self_similarity(self):
        x = rand(40, 6, 0)
        mean, rho = svcca(pr(x, x), variance_threshold=1.0)
        assert abs(mean - 1.0) <= 1e-8
        assert np.allclose(rho, 1.0, atol=1e-8)

    def test_invertible_map_invariance_full_rank(self):
        rng = np.random.default_rng(3)
        x = rand(50, 4, 4)
        a = rng.standard_normal((4, 4)) + 4.0 * np.eye(4)
        mean, _ = svcca(pr(x, x @ a), variance_threshold=1.0)
        assert abs(mean - 1.0) <= 1e-8

    def test_matches_eigensolver_oracle(self):
        for seed in range(50):
            x, y = rand(20, 4, seed), rand(20, 4, seed + 9000)
            mean, _ = svcca(pr(x, y), variance_threshold=1.0)
            want = oracles.eig_cca_mean(x, y, 1.0, None)
            assert abs(mean - want) <= 1e-8

    def test_rho_sorted_and_bounded(self):
        mean, rho = svcca(pr(rand(30, 5, 1), rand(30, 7, 2)), variance_threshold=0.99)
        assert np.all(rho[:-1] >= rho[1:] - 1e-12)
        assert np.all((rho >= 0.0) & (rho <= 1.0))
        assert mean == pytest.approx(float(np.mean(rho)))

    def test_k_cap_limits_components(self):
        _, rho = svcca(pr(rand(40, 8, 5), rand(40, 8, 6)),
                       variance_threshold=1.0, k_cap=2)
        assert len(rho) == 2

    def test_independent_large_n_low_correlation(self):
        mean, _ = svcca(pr(rand(4000, 3, 7), rand(4000, 3, 8)),
                        variance_threshold=1.0)
        assert mean < 0.1

    def test_too_few_rows(self):
        with pytest.raises(ValueError, match="at least 3 rows"):
            svcca(pr(rand(2, 2, 0), rand(2, 2, 1)))

    def test_bad_threshold(self):
        p = pr(rand(10, 3, 0), rand(10, 3, 1))
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(ValueError, match="variance_threshold"):
                svcca(p, variance_threshold=bad)


class TestCKAProperties:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_dual_route_agreement(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 40))
        x = rng.standard_normal((n, int(rng.integers(2, 8))))
        y = rng.standard_normal((n, int(rng.integers(2, 8))))
        assert abs(linear_cka(pr(x, y)) - gram_cka(pr(x, y))) <= 1e-10

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_scale_invariance(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((20, 5))
        y = rng.standard_normal((20, 6))
        c = float(rng.uniform(0.1, 10.0))
        assert abs(linear_cka(pr(c * x, y)) - linear_cka(pr(x, y))) <= 1e-10
