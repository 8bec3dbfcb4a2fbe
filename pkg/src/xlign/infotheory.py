"""Entropy-based uncertainty reduction under a linear-Gaussian model.

H(X) is the differential entropy of a Gaussian fitted to the rows of X;
H(X|Z) is the entropy of the residuals after ridge-regressing X onto Z.
Uncertainty reduction dH = H(CM) - H(CM | conditioning) quantifies how much
of the code-mixed representation the monolingual signals explain. All values
are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedio import Language, LayerEmbeddings

LOG_2PI_E = float(np.log(2.0 * np.pi * np.e))


@dataclass
class EntropyConfig:
    """Estimator knobs. The covariance floor is relative: eps equals
    ``cov_epsilon_scale`` times the mean diagonal of the covariance (falling
    back to the scale itself when the covariance is identically zero), which
    keeps dH invariant under isotropic rescaling of the data."""

    ridge_lambda: float = 1.0
    cov_epsilon_scale: float = 1e-6
    pca_dim: int | None = None

    def __post_init__(self):
        if self.ridge_lambda <= 0.0:
            raise ValueError("ridge_lambda must be > 0")
        if self.cov_epsilon_scale <= 0.0:
            raise ValueError("cov_epsilon_scale must be > 0")
        if self.pca_dim is not None and self.pca_dim < 1:
            raise ValueError("pca_dim must be >= 1 when set")


@dataclass
class ConditioningSet:
    """Non-empty subset of {EN, HI} whose embeddings are column-concatenated
    into the regression design matrix."""

    members: frozenset

    def __post_init__(self):
        members = frozenset(self.members)
        if not members or not members <= {Language.EN, Language.HI}:
            raise ValueError("conditioning set must be a non-empty subset of {EN, HI}")
        self.members = members

    @property
    def key(self) -> str:
        if self.members == {Language.EN, Language.HI}:
            return "joint"
        return next(iter(self.members)).value

    def design_matrix(self, en: np.ndarray, hi: np.ndarray) -> np.ndarray:
        blocks = []
        if Language.EN in self.members:
            blocks.append(en)
        if Language.HI in self.members:
            blocks.append(hi)
        return np.hstack(blocks)


def _regularized_logdet(cov: np.ndarray, scale: float) -> float:
    """log det(cov + eps I) via Cholesky, with the relative eps floor."""
    d = cov.shape[0]
    base = float(np.mean(np.diag(cov)))
    if base <= 0.0:
        base = 1.0
    eps = scale * base
    try:
        chol = np.linalg.cholesky(cov + eps * np.eye(d))
    except np.linalg.LinAlgError:
        raise ValueError("covariance factorization failed after regularization")
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def _sample_cov(mat: np.ndarray) -> np.ndarray:
    centered = mat - mat.mean(axis=0, keepdims=True)
    return centered.T @ centered / (mat.shape[0] - 1)


def gaussian_entropy(X: np.ndarray, cfg: EntropyConfig = EntropyConfig()) -> float:
    """Differential entropy (nats) of a Gaussian with X's sample covariance
    (divisor n-1): d/2 * ln(2*pi*e) + 1/2 * ln det(Sigma + eps I)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    n, d = X.shape
    if n < 2:
        raise ValueError("need at least 2 samples")
    return 0.5 * d * LOG_2PI_E + 0.5 * _regularized_logdet(_sample_cov(X), cfg.cov_epsilon_scale)


def ridge_residuals(X: np.ndarray, Z: np.ndarray, ridge_lambda: float) -> np.ndarray:
    """Residuals X - Z @ B of the closed-form ridge fit on centered data."""
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if X.shape[0] != Z.shape[0]:
        raise ValueError(
            f"dimension mismatch: X has {X.shape[0]} rows, Z has {Z.shape[0]}"
        )
    zc = Z - Z.mean(axis=0, keepdims=True)
    xc = X - X.mean(axis=0, keepdims=True)
    m = zc.shape[1]
    gram = zc.T @ zc + ridge_lambda * np.eye(m)
    try:
        beta = np.linalg.solve(gram, zc.T @ xc)
    except np.linalg.LinAlgError:
        raise ValueError("normal equations ill-conditioned beyond regularization")
    return xc - zc @ beta


def conditional_entropy(
    X: np.ndarray, Z: np.ndarray, cfg: EntropyConfig = EntropyConfig()
) -> float:
    """H(X|Z) in nats: entropy of the ridge-regression residuals of X on Z."""
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if X.ndim != 2 or Z.ndim != 2:
        raise ValueError("X and Z must be 2-D matrices")
    if X.shape[0] < Z.shape[1] + 2:
        raise ValueError(
            f"need n >= m+2 samples, got n={X.shape[0]} for m={Z.shape[1]} regressors"
        )
    residuals = ridge_residuals(X, Z, cfg.ridge_lambda)
    return gaussian_entropy(residuals, cfg)


def pca_reduce(mat: np.ndarray, dim: int) -> np.ndarray:
    """Project onto the top ``dim`` principal components (own basis per matrix)."""
    mat = np.asarray(mat, dtype=np.float64)
    n, d = mat.shape
    if dim >= n:
        raise ValueError(f"pca_dim {dim} must be < n = {n}")
    if dim > d:
        raise ValueError(f"pca_dim {dim} exceeds data dimension {d}")
    centered = mat - mat.mean(axis=0, keepdims=True)
    u, s, _ = np.linalg.svd(centered, full_matrices=False)
    return u[:, :dim] * s[:dim]


_CONDITIONS = (
    ConditioningSet(frozenset({Language.EN})),
    ConditioningSet(frozenset({Language.HI})),
    ConditioningSet(frozenset({Language.EN, Language.HI})),
)


def uncertainty_reduction(
    cm: dict[int, LayerEmbeddings],
    en: dict[int, LayerEmbeddings],
    hi: dict[int, LayerEmbeddings],
    cfg: EntropyConfig = EntropyConfig(),
) -> dict[int, dict[str, float]]:
    """Per-layer dH = H(CM) - H(CM | EN / HI / joint).

    Rows must be triple-aligned across the three sets. When ``cfg.pca_dim``
    is set, every matrix is first reduced to that dimension (each with its own
    principal basis) so all entropies live in the same dimensionality.
    """
    if not (set(cm) == set(en) == set(hi)):
        raise ValueError("layer-set mismatch across languages")
    out: dict[int, dict[str, float]] = {}
    for layer in sorted(cm):
        mats = {}
        for name, emb in (("cm", cm[layer]), ("en", en[layer]), ("hi", hi[layer])):
            if emb.n != cm[layer].n:
                raise ValueError("row count mismatch across languages")
            mat = emb.matrix.astype(np.float64)
            if cfg.pca_dim is not None:
                mat = pca_reduce(mat, cfg.pca_dim)
            mats[name] = mat
        h_cm = gaussian_entropy(mats["cm"], cfg)
        row = {}
        for cond in _CONDITIONS:
            design = cond.design_matrix(mats["en"], mats["hi"])
            row[cond.key] = h_cm - conditional_entropy(mats["cm"], design, cfg)
        out[layer] = row
    return out
