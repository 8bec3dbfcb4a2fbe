"""Integrated gradients on input embeddings.

Attribution for token t is (x_t - b_t) . avg_grad_t where the gradient of
the scalar target is averaged along the straight line from baseline b to
input x.  The path integral uses the midpoint rule: gradients are taken at
alpha = (k + 0.5) / steps, which converges one order faster than the
endpoint sum for smooth targets.  The completeness identity
sum_t attr_t = f(x) - f(b) holds exactly in the limit; the residual at
finite steps is the integration error and is checked against a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import torch

ScalarFn = Callable[[torch.Tensor], torch.Tensor]  # (1, T, d) -> (1,)


class CompletenessError(ValueError):
    """Path integral did not converge; increase steps."""


@dataclass(frozen=True)
class Attribution:
    values: torch.Tensor  # (T,) per-token attribution
    delta: float  # f(x) - f(baseline)
    gap: float  # |sum(values) - delta| / max(|delta|, tiny)


def integrated_gradients(
    f: ScalarFn, x: torch.Tensor, baseline: torch.Tensor, steps: int
) -> Attribution:
    if x.shape != baseline.shape or x.ndim != 2:
        raise ValueError("x and baseline must be matching (tokens, dim) tensors")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    direction = x - baseline
    grad_sum = torch.zeros_like(x)
    for k in range(steps):
        alpha = (k + 0.5) / steps
        z = (baseline + alpha * direction).detach().requires_grad_(True)
        f(z.unsqueeze(0)).squeeze(0).backward()
        grad_sum += z.grad
    values = (direction * (grad_sum / steps)).sum(dim=-1)
    with torch.no_grad():
        delta = (f(x.unsqueeze(0)) - f(baseline.unsqueeze(0))).squeeze(0).item()
    gap = abs(values.sum().item() - delta) / max(abs(delta), torch.finfo(x.dtype).tiny)
    return Attribution(values=values.detach(), delta=delta, gap=gap)


def require_completeness(attr: Attribution, tolerance: float) -> None:
    if attr.gap > tolerance:
        raise CompletenessError(
            f"attribution sum misses f(x)-f(baseline) by {attr.gap:.2%} "
            f"(tolerance {tolerance:.2%}); increase steps"
        )
