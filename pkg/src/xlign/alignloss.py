"""Trilingual alignment objective, analytic gradient, and a desk-scale demo.

The loss is the mean cosine distance between row-normalized EN/HI/CM
embeddings, averaged over the three language pairs and the batch. The demo
optimizer treats the embeddings themselves as free parameters and runs plain
gradient descent, showing that minimizing the objective drives within-triple
cosines to 1 and with them retrieval accuracy and CLAS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedio import TripleIndex

MAX_HALVINGS = 20


@dataclass
class TripleBatch:
    """Aligned raw (unnormalized) embeddings for B triples."""

    E: np.ndarray
    H: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        mats = []
        for name in ("E", "H", "C"):
            mat = np.asarray(getattr(self, name), dtype=np.float64)
            if mat.ndim != 2:
                raise ValueError(f"{name} must be a 2-D matrix")
            if not np.all(np.isfinite(mat)):
                raise ValueError(f"{name} contains non-finite values")
            mats.append(mat)
        if not (mats[0].shape == mats[1].shape == mats[2].shape):
            raise ValueError("E, H, C must share one shape")
        if mats[0].shape[0] < 1:
            raise ValueError("batch must contain at least one triple")
        for name, mat in zip(("E", "H", "C"), mats):
            if np.any(np.linalg.norm(mat, axis=1) == 0.0):
                raise ValueError(f"zero-norm row in {name}")
        self.E, self.H, self.C = mats

    @property
    def batch_size(self) -> int:
        return self.E.shape[0]


@dataclass(frozen=True)
class LossWeight:
    """Coefficient of the alignment term inside a composite training loss."""

    weight: float = 0.05

    def __post_init__(self):
        if not self.weight >= 0.0:
            raise ValueError("loss weight must be >= 0")


@dataclass(frozen=True)
class TrajectoryPoint:
    """One optimizer step: loss and mean within-triple cosine per pair."""

    step: int
    loss: float
    cos_en_hi: float
    cos_en_cm: float
    cos_hi_cm: float

    @property
    def mean_cos(self) -> float:
        return (self.cos_en_hi + self.cos_en_cm + self.cos_hi_cm) / 3.0


@dataclass
class OptimizationResult:
    trajectory: list
    final: TripleBatch


def _normalize_rows(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("zero-norm row")
    return mat / norms, norms


def _pair_cosines(batch: TripleBatch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ue, _ = _normalize_rows(batch.E)
    uh, _ = _normalize_rows(batch.H)
    uc, _ = _normalize_rows(batch.C)
    return (
        np.sum(ue * uh, axis=1),
        np.sum(ue * uc, axis=1),
        np.sum(uh * uc, axis=1),
    )


def align_loss(batch: TripleBatch) -> float:
    """Mean cosine distance over the pairs (E,H), (E,C), (H,C); in [0, 2]."""
    eh, ec, hc = _pair_cosines(batch)
    b = batch.batch_size
    return float(((1.0 - eh).sum() + (1.0 - ec).sum() + (1.0 - hc).sum()) / (3.0 * b))


def align_loss_grad(batch: TripleBatch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradient of align_loss with respect to the raw rows.

    For u = x/|x| paired with unit vector v, d(1 - u.v)/dx = -(v - (u.v) u)/|x|;
    each language accumulates the two pairs touching it, scaled by 1/(3B).
    """
    ue, ne = _normalize_rows(batch.E)
    uh, nh = _normalize_rows(batch.H)
    uc, nc = _normalize_rows(batch.C)
    b = batch.batch_size
    eh = np.sum(ue * uh, axis=1, keepdims=True)
    ec = np.sum(ue * uc, axis=1, keepdims=True)
    hc = np.sum(uh * uc, axis=1, keepdims=True)
    scale = 1.0 / (3.0 * b)
    grad_e = -scale * ((uh - eh * ue) + (uc - ec * ue)) / ne
    grad_h = -scale * ((ue - eh * uh) + (uc - hc * uh)) / nh
    grad_c = -scale * ((ue - ec * uc) + (uh - hc * uc)) / nc
    return grad_e, grad_h, grad_c


def _point(step: int, loss: float, batch: TripleBatch) -> TrajectoryPoint:
    eh, ec, hc = _pair_cosines(batch)
    return TrajectoryPoint(
        step=step,
        loss=loss,
        cos_en_hi=float(eh.mean()),
        cos_en_cm=float(ec.mean()),
        cos_hi_cm=float(hc.mean()),
    )


def optimize_embeddings(
    index: TripleIndex, d: int, steps: int, lr: float, seed: int
) -> OptimizationResult:
    """Full-batch gradient descent on align_loss over free embeddings.

    Every sentence vector starts i.i.d. standard normal. Each step backtracks
    (halving the step size, at most MAX_HALVINGS times) until the loss does
    not increase, so the recorded loss sequence is non-increasing. The raw
    update direction scales the analytic gradient by B: triples are mutually
    independent in this objective, so the effective step per triple must not
    shrink with batch size.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if lr <= 0.0:
        raise ValueError("lr must be > 0")
    if d < 1:
        raise ValueError("d must be >= 1")
    n = len(index.triples)
    rng = np.random.default_rng(seed)
    mats = [rng.standard_normal((n, d)) for _ in range(3)]
    batch = TripleBatch(*mats)
    loss = align_loss(batch)
    trajectory = [_point(0, loss, batch)]
    for step in range(1, steps + 1):
        grads = align_loss_grad(batch)
        step_lr = lr * n
        for halving in range(MAX_HALVINGS + 1):
            candidate = TripleBatch(
                *(m - step_lr * g for m, g in zip(mats, grads))
            )
            candidate_loss = align_loss(candidate)
            if candidate_loss <= loss:
                break
            if halving == MAX_HALVINGS:
                raise RuntimeError(
                    f"divergence at step {step}: loss still increases "
                    f"after {MAX_HALVINGS} halvings"
                )
            step_lr /= 2.0
        mats = [candidate.E, candidate.H, candidate.C]
        batch = candidate
        loss = candidate_loss
        trajectory.append(_point(step, loss, batch))
    return OptimizationResult(trajectory=trajectory, final=batch)
