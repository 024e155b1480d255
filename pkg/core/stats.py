"""Summary statistics for simulated trajectories.

Conventions: standard deviation uses the population (n) divisor as numpy's
``std()`` does; skewness and excess kurtosis are the bias-corrected sample
estimators of pandas' ``skew()`` and ``kurt()``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import InsufficientSampleError, InvalidParameterError, UndefinedStatisticError

STD_CONVENTION = "population (ddof=0)"
SHAPE_CONVENTION = "bias-corrected sample estimator"


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: float
    std: float          # population standard deviation
    skewness: float     # bias-corrected sample skewness
    kurtosis: float     # bias-corrected sample excess kurtosis


@dataclass(frozen=True)
class SpreadReport:
    """Range and standard deviation of a curve (e.g. f_c against network size)."""
    range: float
    std: float


def tail_mean(series: Sequence[float], tail: int) -> float:
    """Mean of the last ``tail`` entries."""
    values = np.asarray(series, dtype=float)
    if not 1 <= tail <= len(values):
        raise InvalidParameterError(f"tail must lie in [1, {len(values)}], got {tail}")
    return float(np.mean(values[-tail:]))


def relative_error(simulated: float, theoretical: float) -> float:
    """|x - x*| / x*."""
    if theoretical == 0:
        raise UndefinedStatisticError("relative error against a zero theoretical value")
    return abs(simulated - theoretical) / theoretical


def moments(sample: Sequence[float]) -> MomentReport:
    values = np.asarray(sample, dtype=float)
    if len(values) < 4:
        raise InsufficientSampleError(f"moments need at least 4 values, got {len(values)}")
    if np.ptp(values) == 0:
        raise UndefinedStatisticError("skewness and kurtosis are undefined for a constant sample")
    s = pd.Series(values)
    return MomentReport(
        n=len(values),
        mean=float(np.mean(values)),
        std=float(np.std(values)),
        skewness=float(s.skew()),
        kurtosis=float(s.kurt()),
    )


def histogram(sample: Sequence[int]) -> dict[int, float]:
    """Empirical probability of each distinct value, keys ascending."""
    if len(sample) == 0:
        raise InsufficientSampleError("histogram of an empty sample")
    counts = Counter(int(v) for v in sample)
    total = len(sample)
    return {value: counts[value] / total for value in sorted(counts)}


def spread(values: Sequence[float]) -> SpreadReport:
    arr = np.asarray(values, dtype=float)
    if len(arr) == 0:
        raise InsufficientSampleError("spread of an empty sample")
    return SpreadReport(range=float(np.ptp(arr)), std=float(np.std(arr)))
