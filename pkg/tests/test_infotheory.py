"""Gaussian entropy, ridge conditioning, and uncertainty reduction."""

import math

import numpy as np
import pytest

from xlign import (
    EntropyConfig,
    Language,
    conditional_entropy,
    gaussian_entropy,
    uncertainty_reduction,
)
from xlign.infotheory import (
    LOG_2PI_E,
    ConditioningSet,
    pca_reduce,
    ridge_residuals,
)

from util import emb


def planted(n=4000, d=4, w_en=0.9, w_hi=0.1, sigma=0.1, seed=0):
    rng = np.random.default_rng(seed)
    en = rng.standard_normal((n, d))
    hi = rng.standard_normal((n, d))
    cm = w_en * en + w_hi * hi + sigma * rng.standard_normal((n, d))
    return en, hi, cm


class TestEntropyConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"ridge_lambda": 0.0},
            {"ridge_lambda": -1.0},
            {"cov_epsilon_scale": 0.0},
            {"cov_epsilon_scale": -1e-9},
            {"pca_dim": 0},
            {"pca_dim": -3},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            EntropyConfig(**kwargs)

    def test_defaults(self):
        cfg = EntropyConfig()
        assert cfg.ridge_lambda == 1.0
        assert cfg.cov_epsilon_scale == 1e-6
        assert cfg.pca_dim is None


class TestConditioningSet:
    def test_keys(self):
        assert ConditioningSet(frozenset({Language.EN})).key == "en"
        assert ConditioningSet(frozenset({Language.HI})).key == "hi"
        assert ConditioningSet(frozenset({Language.EN, Language.HI})).key == "joint"

    def test_invalid_members(self):
        with pytest.raises(ValueError):
            ConditioningSet(frozenset())
        with pytest.raises(ValueError):
            ConditioningSet(frozenset({Language.CM}))

    def test_design_matrix_concatenation(self):
        en = np.ones((5, 2))
        hi = 2.0 * np.ones((5, 3))
        joint = ConditioningSet(frozenset({Language.EN, Language.HI}))
        design = joint.design_matrix(en, hi)
        assert design.shape == (5, 5)
        assert np.array_equal(design[:, :2], en)
        assert np.array_equal(design[:, 2:], hi)


class TestGaussianEntropy:
    def test_unit_variance_scalar(self):
        # sample covariance of (-1, 0, 1) with divisor n-1 is exactly 1
        h = gaussian_entropy(np.array([[-1.0], [0.0], [1.0]]))
        assert h == pytest.approx(0.5 * LOG_2PI_E, abs=1e-5)

    def test_identical_rows_hits_epsilon_floor(self):
        d = 3
        x = np.tile([2.0, -1.0, 0.5], (10, 1))
        # zero covariance: the floor base falls back to 1.0, so the
        # log-determinant is d * ln(eps)
        want = 0.5 * d * LOG_2PI_E + 0.5 * d * math.log(1e-6)
        assert gaussian_entropy(x) == pytest.approx(want, abs=1e-9)

    def test_diagonal_monte_carlo(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((50_000, 3)) * np.array([1.0, 2.0, 3.0])
        want = 1.5 * LOG_2PI_E + 0.5 * math.log(36.0)
        assert gaussian_entropy(x) == pytest.approx(want, abs=0.02)

    def test_scaling_shifts_by_d_log_c(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((200, 4))
        c = 7.3
        # relative epsilon floor makes the shift exact up to round-off
        assert gaussian_entropy(c * x) == pytest.approx(
            gaussian_entropy(x) + 4 * math.log(c), abs=1e-9
        )

    def test_matches_slogdet_route(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((100, 5))
        centered = x - x.mean(axis=0)
        cov = centered.T @ centered / 99
        eps = 1e-6 * float(np.mean(np.diag(cov)))
        _, logdet = np.linalg.slogdet(cov + eps * np.eye(5))
        want = 2.5 * LOG_2PI_E + 0.5 * logdet
        assert gaussian_entropy(x) == pytest.approx(want, abs=1e-9)

    def test_one_dimensional_rejected(self):
        with pytest.raises(ValueError, match="2-D"):
            gaussian_entropy(np.ones(5))

    def test_single_sample_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            gaussian_entropy(np.ones((1, 3)))


class TestRidgeResiduals:
    def test_row_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            ridge_residuals(np.ones((5, 2)), np.ones((6, 2)), 1.0)

    def test_residuals_centered(self):
        rng = np.random.default_rng(3)
        r = ridge_residuals(
            rng.standard_normal((50, 3)), rng.standard_normal((50, 2)), 1.0
        )
        assert np.allclose(r.mean(axis=0), 0.0, atol=1e-12)

    def test_large_lambda_keeps_centered_x(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((40, 2))
        z = rng.standard_normal((40, 2))
        r = ridge_residuals(x, z, 1e12)
        assert np.allclose(r, x - x.mean(axis=0), atol=1e-8)

    def test_exact_linear_map_recovered(self):
        rng = np.random.default_rng(5)
        z = rng.standard_normal((500, 3))
        b = rng.standard_normal((3, 2))
        r = ridge_residuals(z @ b, z, 1e-8)
        assert np.max(np.abs(r)) < 1e-6


class TestConditionalEntropy:
    def test_self_conditioning_collapses_entropy(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((2000, 3))
        assert conditional_entropy(x, x) < gaussian_entropy(x) - 1.0

    def test_independent_conditioning_changes_nothing(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((5000, 3))
        z = rng.standard_normal((5000, 3))
        h = gaussian_entropy(x)
        hc = conditional_entropy(x, z)
        assert abs(h - hc) / abs(h) < 0.01

    def test_planted_noise_floor(self):
        d, sigma = 4, 0.1
        en, hi, cm = planted(n=5000, d=d, sigma=sigma, seed=9)
        want = 0.5 * d * math.log(2.0 * math.pi * math.e * sigma**2)
        got = conditional_entropy(cm, np.hstack([en, hi]))
        assert abs(got - want) / abs(want) < 0.02

    def test_too_few_samples_for_regressors(self):
        with pytest.raises(ValueError, match="n >= m\\+2"):
            conditional_entropy(np.ones((4, 2)), np.ones((4, 3)))

    def test_scaling_x_leaves_reduction_unchanged(self):
        en, hi, cm = planted(n=1000, seed=10)
        z = np.hstack([en, hi])
        base = gaussian_entropy(cm) - conditional_entropy(cm, z)
        scaled = gaussian_entropy(10.0 * cm) - conditional_entropy(10.0 * cm, z)
        assert scaled == pytest.approx(base, abs=1e-9)

    def test_dimension_constant_cancels_in_reduction(self):
        # dH reduces to half the log-det ratio of full vs residual covariance
        en, hi, cm = planted(n=800, d=3, seed=11)
        z = np.hstack([en, hi])
        dh = gaussian_entropy(cm) - conditional_entropy(cm, z)

        def logdet(mat):
            centered = mat - mat.mean(axis=0)
            cov = centered.T @ centered / (mat.shape[0] - 1)
            eps = 1e-6 * float(np.mean(np.diag(cov)))
            return float(np.linalg.slogdet(cov + eps * np.eye(cov.shape[0]))[1])

        resid = ridge_residuals(cm, z, 1.0)
        assert dh == pytest.approx(0.5 * (logdet(cm) - logdet(resid)), abs=1e-9)

    def test_estimator_consistency_across_n(self):
        vals = []
        for n in (500, 5000):
            en, hi, cm = planted(n=n, seed=12)
            vals.append(
                gaussian_entropy(cm) - conditional_entropy(cm, np.hstack([en, hi]))
            )
        assert abs(vals[0] - vals[1]) / abs(vals[1]) < 0.05


class TestPcaReduce:
    def test_shape_and_variance_order(self):
        rng = np.random.default_rng(13)
        x = rng.standard_normal((60, 6)) * np.array([5.0, 4, 3, 2, 1, 0.5])
        red = pca_reduce(x, 3)
        assert red.shape == (60, 3)
        var = red.var(axis=0)
        assert var[0] >= var[1] >= var[2]

    def test_full_rank_preserves_total_variance(self):
        rng = np.random.default_rng(14)
        x = rng.standard_normal((30, 4))
        red = pca_reduce(x, 4)
        centered = x - x.mean(axis=0)
        assert red.var(axis=0).sum() == pytest.approx(
            centered.var(axis=0).sum(), rel=1e-10
        )

    def test_dim_must_be_below_n(self):
        with pytest.raises(ValueError, match="< n"):
            pca_reduce(np.ones((3, 5)), 3)

    def test_dim_must_fit_d(self):
        with pytest.raises(ValueError, match="exceeds"):
            pca_reduce(np.zeros((10, 2)), 3)


class TestUncertaintyReduction:
    def _sets(self, en, hi, cm, layer=0):
        return (
            {layer: emb(cm.astype(np.float32), Language.CM, layer=layer)},
            {layer: emb(en.astype(np.float32), Language.EN, layer=layer)},
            {layer: emb(hi.astype(np.float32), Language.HI, layer=layer)},
        )

    def test_planted_orderings(self):
        en, hi, cm = planted(n=4000, seed=15)
        cms, ens, his = self._sets(en, hi, cm)
        out = uncertainty_reduction(cms, ens, his)
        row = out[0]
        assert set(row) == {"en", "hi", "joint"}
        assert row["en"] > row["hi"]
        assert row["joint"] >= max(row["en"], row["hi"]) - 1e-6

    def test_planted_magnitudes(self):
        d, w_en, w_hi, sigma = 4, 0.9, 0.1, 0.1
        en, hi, cm = planted(n=8000, d=d, seed=16)
        cms, ens, his = self._sets(en, hi, cm)
        row = uncertainty_reduction(cms, ens, his)[0]
        var_cm = w_en**2 + w_hi**2 + sigma**2
        want_en = 0.5 * d * math.log(var_cm / (w_hi**2 + sigma**2))
        want_joint = 0.5 * d * math.log(var_cm / sigma**2)
        assert row["en"] == pytest.approx(want_en, rel=0.05)
        assert row["joint"] == pytest.approx(want_joint, rel=0.05)

    def test_multiple_layers_keyed(self):
        en, hi, cm = planted(n=300, seed=17)
        out = {}
        cms, ens, his = self._sets(en, hi, cm, layer=0)
        c2, e2, h2 = self._sets(hi, en, cm, layer=4)
        cms.update(c2)
        ens.update(e2)
        his.update(h2)
        out = uncertainty_reduction(cms, ens, his)
        assert sorted(out) == [0, 4]

    def test_pca_pre_reduction(self):
        rng = np.random.default_rng(18)
        n, d = 500, 10
        en = rng.standard_normal((n, d))
        hi = rng.standard_normal((n, d))
        cm = 0.9 * en + 0.1 * hi + 0.1 * rng.standard_normal((n, d))
        cms, ens, his = self._sets(en, hi, cm)
        row = uncertainty_reduction(cms, ens, his, EntropyConfig(pca_dim=3))[0]
        assert set(row) == {"en", "hi", "joint"}
        assert all(math.isfinite(v) for v in row.values())

    def test_layer_set_mismatch(self):
        en, hi, cm = planted(n=50, seed=19)
        cms, ens, his = self._sets(en, hi, cm)
        ens = {1: next(iter(ens.values()))}
        with pytest.raises(ValueError, match="layer-set"):
            uncertainty_reduction(cms, ens, his)

    def test_row_count_mismatch(self):
        en, hi, cm = planted(n=50, seed=20)
        cms, ens, his = self._sets(en, hi, cm)
        his = {0: emb(hi[:40].astype(np.float32), Language.HI)}
        with pytest.raises(ValueError, match="row count"):
            uncertainty_reduction(cms, ens, his)
