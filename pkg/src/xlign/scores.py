"""Composite alignment and stability scores.

CLAS compresses six directional retrieval accuracies into one number that
rewards high mean accuracy and punishes directional asymmetry and spread
across language pairs. Consistency summarizes three downstream runs of the
same model as mean minus standard deviation, trading raw score against
run-to-run stability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_PAIRS = (("en_cm_fwd", "en_cm_bwd"), ("en_hi_fwd", "en_hi_bwd"), ("hi_cm_fwd", "hi_cm_bwd"))


@dataclass(frozen=True)
class PairAccuracies:
    """Six directional retrieval accuracies in percent, grouped by language
    pair: EN<->CM, EN<->HI, HI<->CM, each forward then backward."""

    en_cm_fwd: float
    en_cm_bwd: float
    en_hi_fwd: float
    en_hi_bwd: float
    hi_cm_fwd: float
    hi_cm_bwd: float

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            value = float(getattr(self, name))
            if not math.isfinite(value) or not 0.0 <= value <= 100.0:
                raise ValueError(f"{name} must lie in [0, 100], got {value}")
            object.__setattr__(self, name, value)

    @property
    def values(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__dataclass_fields__)

    @property
    def pair_means(self) -> tuple:
        return tuple(
            (getattr(self, fwd) + getattr(self, bwd)) / 2.0 for fwd, bwd in _PAIRS
        )


@dataclass(frozen=True)
class ClasBreakdown:
    """CLAS and its three components: clas = mean_acc - dir_bias - setup_std."""

    mean_acc: float
    dir_bias: float
    setup_std: float
    clas: float

    def __post_init__(self):
        recomposed = self.mean_acc - self.dir_bias - self.setup_std
        if abs(self.clas - recomposed) > 1e-9:
            raise ValueError("clas must equal mean_acc - dir_bias - setup_std")
        if not -150.0 <= self.clas <= 100.0:
            raise ValueError(f"clas out of range [-150, 100]: {self.clas}")


def clas(acc: PairAccuracies) -> ClasBreakdown:
    """Cross-Lingual Alignment Score.

    MeanAcc is the mean of all six accuracies; DirBias the mean absolute
    forward/backward gap over the three pairs; SetupStd the population
    standard deviation (divisor 3) of the three pair means.
    """
    mean_acc = sum(acc.values) / 6.0
    dir_bias = sum(
        abs(getattr(acc, fwd) - getattr(acc, bwd)) for fwd, bwd in _PAIRS
    ) / 3.0
    means = acc.pair_means
    center = sum(means) / 3.0
    setup_std = math.sqrt(sum((m - center) ** 2 for m in means) / 3.0)
    return ClasBreakdown(
        mean_acc=mean_acc,
        dir_bias=dir_bias,
        setup_std=setup_std,
        clas=mean_acc - dir_bias - setup_std,
    )


def consistency(s1: float, s2: float, s3: float, *, population: bool = False) -> float:
    """Mean of three scores minus their standard deviation.

    The sample divisor (n-1 = 2) is the default; ``population`` switches to
    the n = 3 divisor. Both conventions appear in the wild for this statistic,
    so the choice is explicit rather than silent.
    """
    scores = []
    for name, value in (("s1", s1), ("s2", s2), ("s3", s3)):
        value = float(value)
        if not math.isfinite(value) or not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
        scores.append(value)
    mean = sum(scores) / 3.0
    divisor = 3.0 if population else 2.0
    std = math.sqrt(sum((s - mean) ** 2 for s in scores) / divisor)
    return mean - std
