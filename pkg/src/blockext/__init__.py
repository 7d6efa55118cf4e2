"""Block-extremes analysis of daily temperature series.

GEV fitting of annual (or multi-year) maxima and minima, return levels,
bootstrap uncertainty, two-state change analysis and sensitivity studies.
"""

from __future__ import annotations

from .blocks import (
    BlockExtremes,
    DailySeries,
    Season,
    SeasonalStats,
    Variable,
    annual_extremes,
    annual_maxima,
    annual_minima,
    multi_year_extremes,
    seasonal_stats,
)
from .changes import ChangeReport, change_report, compare_states, decompose_location_shift, rl_change_curve
from .fit import FitError, FitResult, Method, fit, fit_ml, fit_pwm, pwm_moments
from .gevcore import GevDomainError, GevParams, Orientation, ReturnLevelQuery, quantile, return_level, sample
from .sensitivity import block_return_level, block_size_diagnostic, rl_change_by_block, segment_experiment
from .synth import SyntheticSpec, generate_daily, two_state_scenario
from .uncertainty import BootstrapConfig, BootstrapResult, Scheme, bootstrap_fit, two_state_pvalue

__version__ = "0.1.0"

__all__ = [
    "BlockExtremes",
    "BootstrapConfig",
    "BootstrapResult",
    "ChangeReport",
    "DailySeries",
    "FitError",
    "FitResult",
    "GevDomainError",
    "GevParams",
    "Method",
    "Orientation",
    "ReturnLevelQuery",
    "Scheme",
    "Season",
    "SeasonalStats",
    "SyntheticSpec",
    "Variable",
    "annual_extremes",
    "annual_maxima",
    "annual_minima",
    "block_return_level",
    "block_size_diagnostic",
    "bootstrap_fit",
    "change_report",
    "compare_states",
    "decompose_location_shift",
    "fit",
    "fit_ml",
    "fit_pwm",
    "generate_daily",
    "multi_year_extremes",
    "pwm_moments",
    "quantile",
    "return_level",
    "rl_change_by_block",
    "rl_change_curve",
    "sample",
    "seasonal_stats",
    "segment_experiment",
    "two_state_pvalue",
    "two_state_scenario",
]
