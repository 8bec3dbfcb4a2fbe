"""Layer-wise representation similarity: linear CKA and SVCCA.

Both metrics compare two n x d matrices whose rows are paired observations
(the same sentence in two languages). All computation runs in float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_ROUNDOFF = 1e-12


@dataclass
class PairedRepresentations:
    """Row-aligned representation matrices X (n x d1) and Y (n x d2)."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.Y = np.asarray(self.Y, dtype=np.float64)
        if self.X.ndim != 2 or self.Y.ndim != 2:
            raise ValueError("representations must be 2-D matrices")
        if self.X.shape[0] != self.Y.shape[0]:
            raise ValueError(
                f"row count mismatch: X has {self.X.shape[0]}, Y has {self.Y.shape[0]}"
            )
        if self.X.shape[0] < 2:
            raise ValueError("need at least 2 paired rows")
        if not (np.isfinite(self.X).all() and np.isfinite(self.Y).all()):
            raise ValueError("non-finite value in representations")


def _center(mat: np.ndarray) -> np.ndarray:
    return mat - mat.mean(axis=0, keepdims=True)


def linear_cka(pair: PairedRepresentations) -> float:
    """Linear CKA: ||Xc' Yc||_F^2 / (||Xc' Xc||_F * ||Yc' Yc||_F) on
    column-centered matrices. Invariant to isotropic scaling, orthogonal
    transforms, and constant row offsets; result in [0, 1].
    """
    xc = _center(pair.X)
    yc = _center(pair.Y)
    denom_x = np.linalg.norm(xc.T @ xc)
    denom_y = np.linalg.norm(yc.T @ yc)
    if denom_x <= 0.0 or denom_y <= 0.0:
        raise ValueError("degenerate representations: zero variance after centering")
    value = np.linalg.norm(xc.T @ yc) ** 2 / (denom_x * denom_y)
    return _clamp_unit(value)


def _clamp_unit(value: float) -> float:
    # Cauchy-Schwarz bounds the exact value to [0,1]; only round-off may leak.
    if not -_ROUNDOFF <= value <= 1.0 + _ROUNDOFF:
        raise ValueError(f"similarity outside [0,1] beyond round-off: {value!r}")
    return float(min(max(value, 0.0), 1.0))


def gram_cka(pair: PairedRepresentations) -> float:
    """Gram-matrix (HSIC) formulation of linear CKA; agrees with
    :func:`linear_cka` to round-off and serves as its cross-check."""
    n = pair.X.shape[0]
    k = pair.X @ pair.X.T
    l = pair.Y @ pair.Y.T
    h = np.eye(n) - np.ones((n, n)) / n
    kc = h @ k @ h
    lc = h @ l @ h
    hsic_xy = np.trace(kc @ lc)
    hsic_xx = np.trace(kc @ kc)
    hsic_yy = np.trace(lc @ lc)
    # a constant side leaves kc as pure round-off noise rather than exact
    # zero, so the guard must be relative to the raw Gram norm
    floor = (np.finfo(np.float64).eps * n) ** 2
    if hsic_xx <= floor * np.trace(k @ k) or hsic_yy <= floor * np.trace(l @ l):
        raise ValueError("degenerate representations: zero variance after centering")
    value = hsic_xy / np.sqrt(hsic_xx * hsic_yy)
    return _clamp_unit(value)


def _pca_basis(mat: np.ndarray, variance_threshold: float, k_cap: int | None):
    """Orthonormal basis (n x k) of the top principal subspace covering
    ``variance_threshold`` of the variance, via SVD of the centered matrix."""
    n, d = mat.shape
    centered = _center(mat)
    u, s, _ = np.linalg.svd(centered, full_matrices=False)
    var = s**2
    total = var.sum()
    if total <= 0.0:
        raise ValueError("degenerate representations: zero variance after centering")
    cum = np.cumsum(var) / total
    k = int(np.searchsorted(cum, variance_threshold - _ROUNDOFF) + 1)
    cap = min(n - 1, d)
    if k_cap is not None:
        cap = min(cap, k_cap)
    k = min(k, cap)
    if k < 1:
        raise ValueError("k=0 after thresholding")
    if s[k - 1] <= np.finfo(np.float64).eps * max(n, d) * s[0]:
        raise ValueError("degenerate subspace: rank-deficient whitening")
    return u[:, :k], k


def svcca(
    pair: PairedRepresentations,
    variance_threshold: float = 0.99,
    k_cap: int | None = None,
) -> tuple[float, np.ndarray]:
    """SVCCA: PCA-reduce each side to the smallest k reaching the cumulative
    explained-variance threshold, then take canonical correlations between the
    reduced subspaces. Returns (mean rho, per-component rho, descending).

    The canonical correlations are the singular values of Qx' Qy where Qx, Qy
    are the orthonormal PCA score bases; with fewer retained components on one
    side, min(kx, ky) correlations are produced.
    """
    if not 0.0 < variance_threshold <= 1.0:
        raise ValueError("variance_threshold must be in (0, 1]")
    n = pair.X.shape[0]
    if n < 3:
        raise ValueError("need at least 3 rows for SVCCA")
    qx, kx = _pca_basis(pair.X, variance_threshold, k_cap)
    qy, ky = _pca_basis(pair.Y, variance_threshold, k_cap)
    if n <= max(kx, ky):
        raise ValueError(f"need n > retained k, got n={n}, k={max(kx, ky)}")
    rho = np.linalg.svd(qx.T @ qy, compute_uv=False)
    rho = np.clip(rho, 0.0, 1.0)
    return float(rho.mean()), rho
