"""Comparison of two climate states for one grid cell.

Parameter changes are reported as B - A with bootstrap p-values and
significance marks, return-level changes as a curve over return periods with
a bootstrap envelope, and location shifts are compared with the shift implied
by the seasonal mean and standard deviation,

    mu2 - m2 ~ (mu1 - m1) * s2 / s1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .blocks import (
    DailySeries,
    Season,
    SeasonalAggregates,
    SeasonalStats,
    annual_extremes,
    seasonal_aggregates,
    seasonal_stats,
)
from .fit import FitError, FitResult, Method, fit
from .gevcore import Orientation, return_level_array
from .uncertainty import BootstrapConfig, BootstrapResult, PValue, bootstrap_fit, paired_pvalue, resample

__all__ = [
    "DEFAULT_PERIODS",
    "ChangeReport",
    "LocationShift",
    "LocationShiftBootstrap",
    "ReturnLevelChangeCurve",
    "change_report",
    "compare_states",
    "decompose_location_shift",
    "location_shift_bootstrap",
    "rl_change_curve",
    "season_for",
]

# 21 log-spaced return periods from 10 to 1000 years
DEFAULT_PERIODS = tuple(float(r) for r in np.geomspace(10.0, 1000.0, 21))
# |delta m| below this leaves the ratio delta mu / delta m undefined
MIN_MEAN_SHIFT = 1e-6


def season_for(orientation: Orientation | str) -> Season:
    """JJA for warm extremes, DJF for cold extremes."""
    return Season.JJA if Orientation.parse(orientation) is Orientation.MAXIMA else Season.DJF


@dataclass(frozen=True, eq=False)
class ReturnLevelChangeCurve:
    periods: np.ndarray
    delta: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    level: float | None = None


@dataclass(frozen=True)
class LocationShift:
    """Observed location change against the seasonal-statistics prediction."""

    m1: float
    s1: float
    m2: float
    s2: float
    mu1: float
    mu2: float

    @property
    def predicted_mu2(self) -> float:
        return self.m2 + (self.mu1 - self.m1) * self.s2 / self.s1

    @property
    def predicted_delta_mu(self) -> float:
        return self.predicted_mu2 - self.mu1

    @property
    def observed_delta_mu(self) -> float:
        return self.mu2 - self.mu1

    @property
    def delta_m(self) -> float:
        return self.m2 - self.m1

    @property
    def residual(self) -> float:
        """Observed minus predicted ``mu2``."""
        return self.mu2 - self.predicted_mu2

    @property
    def ratio(self) -> float | None:
        """``delta mu / delta m``; None when the seasonal mean does not move."""
        if abs(self.delta_m) < MIN_MEAN_SHIFT:
            return None
        return self.observed_delta_mu / self.delta_m


@dataclass(frozen=True, eq=False)
class ChangeReport:
    cell_id: str
    orientation: Orientation
    fit_a: FitResult
    fit_b: FitResult
    pvalues: dict[str, PValue]
    curve: ReturnLevelChangeCurve | None = None
    location: LocationShift | None = None
    location_se: float | None = None
    n_replicates: int = 0
    failed_replicates: tuple[int, int] = (0, 0)

    @property
    def delta_mu(self) -> float:
        return self.fit_b.params.mu - self.fit_a.params.mu

    @property
    def delta_sigma(self) -> float:
        return self.fit_b.params.sigma - self.fit_a.params.sigma

    @property
    def delta_log_sigma(self) -> float:
        return math.log(self.fit_b.params.sigma) - math.log(self.fit_a.params.sigma)

    @property
    def delta_xi(self) -> float:
        return self.fit_b.params.xi - self.fit_a.params.xi

    @property
    def marks(self) -> dict[str, str]:
        return {name: pv.mark for name, pv in self.pvalues.items()}


def compare_states(
    fit_a: FitResult,
    fit_b: FitResult,
    boot_a: BootstrapResult,
    boot_b: BootstrapResult,
    cell_id: str = "",
) -> ChangeReport:
    """Parameter deltas B - A with p-values from row-paired bootstrap replicates.

    The scale is tested on the log scale; its mark applies to both
    ``delta_sigma`` and ``delta_log_sigma``.
    """
    if fit_a.params.orientation is not fit_b.params.orientation:
        raise ValueError("cannot compare maxima with minima")
    if boot_a.config.n_replicates != boot_b.config.n_replicates:
        raise ValueError("bootstrap results must have the same number of replicates")
    pvalues = {
        "mu": paired_pvalue(boot_a, boot_b, "mu"),
        "sigma": paired_pvalue(boot_a, boot_b, "log_sigma"),
        "xi": paired_pvalue(boot_a, boot_b, "xi"),
    }
    return ChangeReport(
        cell_id=cell_id,
        orientation=fit_a.params.orientation,
        fit_a=fit_a,
        fit_b=fit_b,
        pvalues=pvalues,
        n_replicates=boot_a.config.n_replicates,
        failed_replicates=(boot_a.n_failed, boot_b.n_failed),
    )


def rl_change_curve(
    fit_a: FitResult,
    fit_b: FitResult,
    boot_a: BootstrapResult | None = None,
    boot_b: BootstrapResult | None = None,
    periods=DEFAULT_PERIODS,
    level: float | None = None,
) -> ReturnLevelChangeCurve:
    """Return-level change ``RL_B(r) - RL_A(r)`` with an optional paired envelope."""
    periods = np.asarray(periods, dtype=float)
    if periods.ndim != 1 or np.any(np.diff(periods) <= 0):
        raise ValueError("return periods must be strictly increasing")
    orientation = fit_a.params.orientation
    b = fit_a.block_length
    if fit_b.block_length != b or fit_b.params.orientation is not orientation:
        raise ValueError("fits differ in block length or orientation")

    def levels(params_rows: np.ndarray) -> np.ndarray:
        return return_level_array(params_rows[:, 0], params_rows[:, 1], params_rows[:, 2], orientation, periods, b)

    point = np.array([fit_a.params.as_tuple(), fit_b.params.as_tuple()])
    rl = levels(point)
    delta = rl[1] - rl[0]
    if boot_a is None or boot_b is None:
        return ReturnLevelChangeCurve(periods, delta)
    level = boot_a.config.level if level is None else level
    diffs = levels(boot_b.estimates) - levels(boot_a.estimates)
    diffs = diffs[np.all(np.isfinite(diffs), axis=1)]
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(diffs, [tail, 1.0 - tail], axis=0)
    return ReturnLevelChangeCurve(periods, delta, lower, upper, level)


def decompose_location_shift(
    seasonal_a: SeasonalStats,
    seasonal_b: SeasonalStats,
    fit_a: FitResult,
    fit_b: FitResult,
) -> LocationShift:
    """Compare the fitted ``mu2`` with ``m2 + (mu1 - m1) s2 / s1``."""
    if not seasonal_a.sd > 0:
        raise ValueError("state A seasonal standard deviation must be positive")
    return LocationShift(
        m1=seasonal_a.mean,
        s1=seasonal_a.sd,
        m2=seasonal_b.mean,
        s2=seasonal_b.sd,
        mu1=fit_a.params.mu,
        mu2=fit_b.params.mu,
    )


@dataclass(frozen=True, eq=False)
class LocationShiftBootstrap:
    point: LocationShift
    residuals: np.ndarray = field(repr=False)

    @property
    def se(self) -> float:
        r = self.residuals[np.isfinite(self.residuals)]
        return float(np.std(r, ddof=1))

    def agrees(self, n_se: float = 2.0) -> bool:
        return abs(self.point.residual) <= n_se * self.se


@dataclass(frozen=True)
class _ShiftReplicate:
    extremes_a: object
    extremes_b: object
    seasons_a: SeasonalAggregates
    seasons_b: SeasonalAggregates
    config: BootstrapConfig
    method: Method
    start_a: object
    start_b: object

    def __call__(self, k: int) -> float:
        idx_a = resample(self.extremes_a.n_blocks, self.config, k, 0)
        idx_b = resample(self.extremes_b.n_blocks, self.config, k, 1)
        try:
            fa = fit(self.extremes_a.take(idx_a), self.method, start=self.start_a)
            fb = fit(self.extremes_b.take(idx_b), self.method, start=self.start_b)
        except FitError:
            return math.nan
        if not (fa.converged and fb.converged):
            return math.nan
        shift = LocationShift(
            *_mean_sd(self.seasons_a, idx_a), *_mean_sd(self.seasons_b, idx_b), fa.params.mu, fb.params.mu
        )
        return shift.residual


def _mean_sd(aggregates: SeasonalAggregates, idx) -> tuple[float, float]:
    stats = aggregates.pooled(idx)
    return stats.mean, stats.sd


def location_shift_bootstrap(
    series_a: DailySeries,
    series_b: DailySeries,
    orientation: Orientation | str,
    config: BootstrapConfig,
    method: Method | str = Method.ML,
) -> LocationShiftBootstrap:
    """Bootstrap the residual ``mu2 - predicted mu2``.

    Years are resampled jointly for the extremes and the season they belong
    to (JJA with calendar-year maxima, DJF with July-June minima), and
    independently for the two states.
    """
    orientation = Orientation.parse(orientation)
    method = Method(method)
    season = season_for(orientation)
    ext_a = annual_extremes(series_a, orientation)
    ext_b = annual_extremes(series_b, orientation)
    agg_a = seasonal_aggregates(series_a, season)
    agg_b = seasonal_aggregates(series_b, season)
    fit_a = fit(ext_a, method)
    fit_b = fit(ext_b, method)
    point = decompose_location_shift(agg_a.pooled(), agg_b.pooled(), fit_a, fit_b)
    start_a = fit_a.params if method is Method.ML else None
    start_b = fit_b.params if method is Method.ML else None
    job = _ShiftReplicate(ext_a, ext_b, agg_a, agg_b, config, method, start_a, start_b)
    residuals = np.array(pmap(job, range(config.n_replicates), config.workers), dtype=float)
    return LocationShiftBootstrap(point, residuals)


def change_report(
    series_a: DailySeries,
    series_b: DailySeries,
    orientation: Orientation | str,
    config: BootstrapConfig,
    method: Method | str = Method.ML,
    periods=DEFAULT_PERIODS,
    cell_id: str | None = None,
) -> ChangeReport:
    """Full two-state analysis of one cell: parameters, curve and location shift."""
    orientation = Orientation.parse(orientation)
    method = Method(method)
    ext_a = annual_extremes(series_a, orientation)
    ext_b = annual_extremes(series_b, orientation)
    fit_a = fit(ext_a, method)
    fit_b = fit(ext_b, method)
    boot_a = bootstrap_fit(ext_a, config, method, stream=0, point=fit_a)
    boot_b = bootstrap_fit(ext_b, config, method, stream=1, point=fit_b)
    report = compare_states(fit_a, fit_b, boot_a, boot_b, cell_id or series_a.cell_id)
    season = season_for(orientation)
    location = decompose_location_shift(
        seasonal_stats(series_a, season), seasonal_stats(series_b, season), fit_a, fit_b
    )
    mu_se = math.hypot(boot_a.standard_error("mu"), boot_b.standard_error("mu"))
    return ChangeReport(
        cell_id=report.cell_id,
        orientation=orientation,
        fit_a=fit_a,
        fit_b=fit_b,
        pvalues=report.pvalues,
        curve=rl_change_curve(fit_a, fit_b, boot_a, boot_b, periods),
        location=location,
        location_se=mu_se,
        n_replicates=config.n_replicates,
        failed_replicates=report.failed_replicates,
    )
