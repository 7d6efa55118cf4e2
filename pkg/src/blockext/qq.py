"""Quantile-quantile pairs for checking a GEV fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockExtremes
from .fit import FitResult
from .gevcore import quantile

__all__ = ["QQPairs", "qq_pairs"]


@dataclass(frozen=True, eq=False)
class QQPairs:
    probabilities: np.ndarray
    empirical: np.ndarray
    fitted: np.ndarray

    @property
    def max_abs_deviation(self) -> float:
        return float(np.max(np.abs(self.empirical - self.fitted)))


def qq_pairs(extremes: BlockExtremes, fit_result: FitResult) -> QQPairs:
    """Sorted data ``y_(i)`` against fitted quantiles at ``p_i = i / (n + 1)``."""
    if fit_result.params.orientation is not extremes.orientation:
        raise ValueError("fit and data have different orientations")
    empirical = np.sort(extremes.values)
    n = empirical.size
    p = np.arange(1, n + 1) / (n + 1.0)
    return QQPairs(p, empirical, np.asarray(quantile(fit_result.params, p), dtype=float))
