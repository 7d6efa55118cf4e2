"""Sensitivity studies: block-size consistency of the shape and segment sampling error.

The block-size diagnostic refits the annual extremes regrouped into 2-, 5-
and 10-year blocks. Under max-stability the shape does not depend on the
block length, so a significant ``xi_10 - xi_1`` means the annual blocks are
not yet in the asymptotic regime.

The segment experiment splits two equally long runs into aligned
non-overlapping segments, refits each segment pair and compares the
estimated return-level change with the change estimated from the full runs.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .blocks import BlockExtremes, DailySeries, annual_extremes, multi_year_extremes
from .fit import FitError, FitResult, Method, fit, fit_ml
from .gevcore import GevParams, Orientation, ReturnLevelQuery, return_level, return_level_array
from .uncertainty import BootstrapConfig, bootstrap_pvalue, resample

__all__ = [
    "DIAGNOSTIC_BLOCKS",
    "BlockDiagnostic",
    "BlockRlComparison",
    "SegmentExperiment",
    "block_return_level",
    "block_size_diagnostic",
    "rl_change_by_block",
    "segment_experiment",
]

DIAGNOSTIC_BLOCKS = (1, 2, 5, 10)
DIAGNOSTIC_REPLICATES = 500
DIAGNOSTIC_ALPHA = 0.05
MIN_LONG_BLOCKS = 10


@dataclass(frozen=True, eq=False)
class BlockDiagnostic:
    cell_id: str
    xi_by_block: dict[int, float]
    xi_diff: float
    pvalue: float
    alpha: float
    n_replicates: int
    n_failed: int
    replicate_diffs: np.ndarray = field(repr=False)
    long_block: int = 10

    @property
    def flagged(self) -> bool:
        return self.pvalue < self.alpha


@dataclass(frozen=True)
class _DiagnosticReplicate:
    extremes: BlockExtremes
    long_block: int
    config: BootstrapConfig
    start_short: GevParams
    start_long: GevParams

    def __call__(self, k: int) -> float:
        idx = resample(self.extremes.n_blocks, self.config, k)
        annual = self.extremes.take(idx)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                short = fit_ml(annual, start=self.start_short)
                long = short if self.long_block == 1 else fit_ml(
                    multi_year_extremes(annual, self.long_block), start=self.start_long
                )
        except FitError:
            return math.nan
        if not (short.converged and long.converged):
            return math.nan
        return long.params.xi - short.params.xi


def block_size_diagnostic(
    extremes: BlockExtremes,
    config: BootstrapConfig | None = None,
    block_lengths: Sequence[int] = DIAGNOSTIC_BLOCKS,
    alpha: float = DIAGNOSTIC_ALPHA,
    cell_id: str = "",
) -> BlockDiagnostic:
    """Test whether the ML shape estimate changes with the block length.

    The statistic is ``xi(longest block) - xi(1 year)``. Each bootstrap
    replicate resamples years (with ``config``'s scheme), regroups the
    resampled annual extremes and refits both block lengths. The p-value is
    the two-sided replicate count ``2 min(#{d* <= 0}, #{d* >= 0}) / K``.

    Args:
        extremes: Annual extremes (``block_length == 1``).
        config: Resampling settings; defaults to 500 replicates.
        block_lengths: Block lengths (years) to refit; must include 1.
        alpha: Flagging level.
        cell_id: Label carried into the result.

    Raises:
        ValueError: If the data are not annual or there are fewer than ten
            blocks of the longest length.
    """
    if extremes.block_length != 1:
        raise ValueError("the diagnostic needs annual extremes")
    block_lengths = tuple(sorted({int(b) for b in block_lengths}))
    if block_lengths[0] != 1:
        raise ValueError("block lengths must include 1")
    long_block = block_lengths[-1]
    if extremes.n_blocks < MIN_LONG_BLOCKS * long_block:
        raise ValueError(
            f"need at least {MIN_LONG_BLOCKS * long_block} years for {long_block}-year blocks, got {extremes.n_blocks}"
        )
    if config is None:
        config = BootstrapConfig(n_replicates=DIAGNOSTIC_REPLICATES)
    fits = {b: fit_ml(extremes if b == 1 else multi_year_extremes(extremes, b)) for b in block_lengths}
    xi_by_block = {b: f.params.xi for b, f in fits.items()}
    xi_diff = xi_by_block[long_block] - xi_by_block[1]
    job = _DiagnosticReplicate(extremes, long_block, config, fits[1].params, fits[long_block].params)
    diffs = np.array(pmap(job, range(config.n_replicates), config.workers), dtype=float)
    p, _ = bootstrap_pvalue(diffs)
    return BlockDiagnostic(
        cell_id=cell_id,
        xi_by_block=xi_by_block,
        xi_diff=xi_diff,
        pvalue=p,
        alpha=alpha,
        n_replicates=config.n_replicates,
        n_failed=int(np.isnan(diffs).sum()),
        replicate_diffs=diffs,
        long_block=long_block,
    )


def block_return_level(fit_result: FitResult, periods) -> float | np.ndarray:
    """Return levels from a fit to ``b``-year blocks, using ``p = b / r``.

    Raises:
        ValueError: If a period does not exceed the block length.
    """
    b = fit_result.block_length
    scalar = np.ndim(periods) == 0
    r = np.atleast_1d(np.asarray(periods, dtype=float))
    if np.any(r <= b):
        raise ValueError(f"return periods must exceed the block length {b}")
    if scalar:
        return return_level(fit_result.params, ReturnLevelQuery(float(r[0]), b))
    p = fit_result.params
    return return_level_array(p.mu, p.sigma, p.xi, p.orientation, r, b)[0]


@dataclass(frozen=True, eq=False)
class BlockRlComparison:
    """Return-level changes B - A estimated from fits at several block lengths."""

    periods: np.ndarray
    delta_by_block: dict[int, np.ndarray]
    fits: dict[int, tuple[FitResult, FitResult]]


def rl_change_by_block(
    extremes_a: BlockExtremes,
    extremes_b: BlockExtremes,
    periods,
    block_lengths: Sequence[int] = (1, 10),
    method: Method | str = Method.ML,
) -> BlockRlComparison:
    """Compare ``RL_B(r) - RL_A(r)`` from annual and multi-year block fits."""
    periods = np.asarray(periods, dtype=float)
    block_lengths = tuple(sorted({int(b) for b in block_lengths}))
    if np.any(periods <= block_lengths[-1]):
        raise ValueError(f"return periods must exceed the longest block length {block_lengths[-1]}")
    deltas, fits = {}, {}
    for b in block_lengths:
        ea = extremes_a if b == extremes_a.block_length else multi_year_extremes(extremes_a, b)
        eb = extremes_b if b == extremes_b.block_length else multi_year_extremes(extremes_b, b)
        fa, fb = fit(ea, method), fit(eb, method)
        deltas[b] = block_return_level(fb, periods) - block_return_level(fa, periods)
        fits[b] = (fa, fb)
    return BlockRlComparison(periods, deltas, fits)


@dataclass(frozen=True, eq=False)
class SegmentExperiment:
    segment_length: int
    return_periods: tuple[float, ...]
    method: Method
    orientation: Orientation
    truth: np.ndarray
    estimates: np.ndarray
    xi_a: np.ndarray
    xi_b: np.ndarray

    @property
    def n_pairs(self) -> int:
        return self.estimates.shape[0]

    @property
    def errors(self) -> np.ndarray:
        """Estimated minus full-run change, one row per segment pair."""
        return self.estimates - self.truth[None, :]

    def summary(self) -> dict[float, dict[str, float]]:
        """Error distribution per return period."""
        out = {}
        for j, r in enumerate(self.return_periods):
            e = self.errors[:, j]
            e = e[np.isfinite(e)]
            if e.size == 0:
                out[r] = {"n": 0}
                continue
            q1, med, q3 = np.quantile(e, [0.25, 0.5, 0.75])
            out[r] = {
                "n": int(e.size),
                "mean": float(e.mean()),
                "sd": float(e.std(ddof=1)) if e.size > 1 else math.nan,
                "q25": float(q1),
                "median": float(med),
                "q75": float(q3),
                "min": float(e.min()),
                "max": float(e.max()),
            }
        return out


@dataclass(frozen=True)
class _SegmentPair:
    series_a: DailySeries
    series_b: DailySeries
    segment_length: int
    periods: tuple[float, ...]
    method: Method
    orientation: Orientation

    def __call__(self, i: int) -> tuple[np.ndarray, float, float]:
        lo, hi = i * self.segment_length, (i + 1) * self.segment_length
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                fa = fit(annual_extremes(self.series_a.years(lo, hi), self.orientation), self.method)
                fb = fit(annual_extremes(self.series_b.years(lo, hi), self.orientation), self.method)
        except FitError:
            return np.full(len(self.periods), math.nan), math.nan, math.nan
        delta = _levels(fb, self.periods) - _levels(fa, self.periods)
        return delta, fa.params.xi, fb.params.xi


def _levels(f: FitResult, periods) -> np.ndarray:
    p = f.params
    return return_level_array(p.mu, p.sigma, p.xi, p.orientation, periods, f.block_length)[0]


def segment_experiment(
    series_a: DailySeries,
    series_b: DailySeries,
    segment_length: int,
    return_periods: Sequence[float] = (20.0, 50.0, 100.0),
    method: Method | str = Method.ML,
    orientation: Orientation | str = Orientation.MAXIMA,
    workers: int = 1,
) -> SegmentExperiment:
    """Sampling error of return-level changes estimated from short segments.

    Segment ``i`` covers years ``[i L, (i + 1) L)`` of both runs; there are
    ``n_years // L`` pairs. The reference change comes from fits to the full
    runs with the same method.
    """
    method = Method(method)
    orientation = Orientation.parse(orientation)
    L = int(segment_length)
    if series_a.n_years != series_b.n_years:
        raise ValueError("both runs must have the same length")
    if L < 1 or L > series_a.n_years:
        raise ValueError(f"segment length {L} does not fit a {series_a.n_years}-year run")
    periods = tuple(float(r) for r in return_periods)
    full_a = fit(annual_extremes(series_a, orientation), method)
    full_b = fit(annual_extremes(series_b, orientation), method)
    truth = _levels(full_b, periods) - _levels(full_a, periods)
    n_pairs = series_a.n_years // L
    job = _SegmentPair(series_a, series_b, L, periods, method, orientation)
    rows = pmap(job, range(n_pairs), workers)
    return SegmentExperiment(
        segment_length=L,
        return_periods=periods,
        method=method,
        orientation=orientation,
        truth=truth,
        estimates=np.array([r[0] for r in rows]),
        xi_a=np.array([r[1] for r in rows]),
        xi_b=np.array([r[2] for r in rows]),
    )
