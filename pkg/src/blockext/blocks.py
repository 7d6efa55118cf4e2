"""Daily series on a 365-day calendar, block extrema and seasonal statistics.

Day numbers are 1-based days of a no-leap year:

* annual maxima use calendar years (days 1-365);
* annual minima run from July 1 (day 182) through June 30 (day 181) of the
  next year, so the first and last half-years are discarded;
* JJA is days 152-243; DJF is December (days 335-365) of one year together
  with January-February (days 1-59) of the next.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gevcore import Orientation

__all__ = [
    "DAYS_PER_YEAR",
    "BlockExtremes",
    "DailySeries",
    "SeasonalAggregates",
    "Season",
    "SeasonalStats",
    "Variable",
    "annual_extremes",
    "annual_maxima",
    "annual_minima",
    "multi_year_extremes",
    "season_mask",
    "seasonal_aggregates",
    "seasonal_stats",
]

DAYS_PER_YEAR = 365
JULY_FIRST = 182
JJA_DAYS = (152, 243)
DEC_DAYS = (335, 365)
JAN_FEB_DAYS = (1, 59)


class Variable(str, Enum):
    TMAX = "tmax"
    TMIN = "tmin"


class Season(str, Enum):
    JJA = "JJA"
    DJF = "DJF"


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Daily values for one grid cell, ``365 * n_years`` long."""

    values: np.ndarray
    cell_id: str = "cell"
    latitude: float = math.nan
    longitude: float = math.nan
    start_year: int = 1
    variable: Variable = Variable.TMAX

    def __post_init__(self) -> None:
        values = _readonly(self.values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("daily series must be a nonempty 1-D sequence")
        if values.size % DAYS_PER_YEAR:
            raise ValueError(
                f"series length {values.size} is not a whole number of 365-day years"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("daily values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "variable", Variable(self.variable))
        object.__setattr__(self, "start_year", int(self.start_year))

    @property
    def n_years(self) -> int:
        return self.values.size // DAYS_PER_YEAR

    def by_year(self) -> np.ndarray:
        """View of the values as an ``(n_years, 365)`` array."""
        return self.values.reshape(self.n_years, DAYS_PER_YEAR)

    def years(self, start: int, stop: int) -> DailySeries:
        """Sub-series covering years ``start`` (inclusive) to ``stop`` (exclusive), 0-based."""
        if not 0 <= start < stop <= self.n_years:
            raise ValueError(f"year range [{start}, {stop}) outside 0..{self.n_years}")
        return DailySeries(
            self.values[start * DAYS_PER_YEAR : stop * DAYS_PER_YEAR],
            cell_id=self.cell_id,
            latitude=self.latitude,
            longitude=self.longitude,
            start_year=self.start_year + start,
            variable=self.variable,
        )


@dataclass(frozen=True, eq=False)
class BlockExtremes:
    """One extremum per block of ``block_length`` years."""

    values: np.ndarray
    orientation: Orientation = Orientation.MAXIMA
    block_length: int = 1

    def __post_init__(self) -> None:
        values = _readonly(self.values)
        if values.ndim != 1:
            raise ValueError("block extremes must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("block extremes must be finite")
        if int(self.block_length) < 1:
            raise ValueError("block length must be at least one year")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "orientation", Orientation.parse(self.orientation))
        object.__setattr__(self, "block_length", int(self.block_length))

    @property
    def n_blocks(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def take(self, indices) -> BlockExtremes:
        """Extremes re-ordered (or resampled) by block index."""
        return BlockExtremes(self.values[np.asarray(indices)], self.orientation, self.block_length)

    def negated(self) -> BlockExtremes:
        """The negated values in the opposite orientation."""
        other = Orientation.MINIMA if self.orientation is Orientation.MAXIMA else Orientation.MAXIMA
        return BlockExtremes(-self.values, other, self.block_length)


@dataclass(frozen=True)
class SeasonalStats:
    season: Season
    mean: float
    sd: float
    n_days: int

    @property
    def degenerate(self) -> bool:
        return not self.sd > 0


def annual_maxima(series: DailySeries) -> BlockExtremes:
    """Maximum of each calendar year (January 1 to December 31)."""
    return BlockExtremes(series.by_year().max(axis=1), Orientation.MAXIMA, 1)


def annual_minima(series: DailySeries) -> BlockExtremes:
    """Minimum of each July 1 - June 30 block; ``n_years - 1`` blocks."""
    n_blocks = series.n_years - 1
    if n_blocks < 1:
        raise ValueError("annual minima need at least two years of daily data")
    start = JULY_FIRST - 1
    windows = series.values[start : start + n_blocks * DAYS_PER_YEAR]
    return BlockExtremes(windows.reshape(n_blocks, DAYS_PER_YEAR).min(axis=1), Orientation.MINIMA, 1)


def annual_extremes(series: DailySeries, orientation: Orientation | str) -> BlockExtremes:
    """Annual maxima or annual minima depending on ``orientation``."""
    if Orientation.parse(orientation) is Orientation.MAXIMA:
        return annual_maxima(series)
    return annual_minima(series)


def multi_year_extremes(extremes: BlockExtremes, new_b: int) -> BlockExtremes:
    """Reduce consecutive blocks to ``new_b``-year blocks; the remainder is dropped.

    ``new_b`` is the target block length in years and must be a multiple of
    the current block length.
    """
    new_b = int(new_b)
    if new_b < 1 or new_b % extremes.block_length:
        raise ValueError(
            f"new block length {new_b} is not a multiple of {extremes.block_length}"
        )
    group = new_b // extremes.block_length
    n_groups = extremes.n_blocks // group
    if n_groups < 1:
        raise ValueError(f"{extremes.n_blocks} blocks cannot form a {new_b}-year block")
    grouped = extremes.values[: n_groups * group].reshape(n_groups, group)
    if extremes.orientation is Orientation.MAXIMA:
        reduced = grouped.max(axis=1)
    else:
        reduced = grouped.min(axis=1)
    return BlockExtremes(reduced, extremes.orientation, new_b)


def season_mask(season: Season | str) -> np.ndarray:
    """Boolean mask over the 365 days of a year (index 0 is January 1)."""
    day = np.arange(1, DAYS_PER_YEAR + 1)
    if Season(season) is Season.JJA:
        return (day >= JJA_DAYS[0]) & (day <= JJA_DAYS[1])
    return ((day >= DEC_DAYS[0]) & (day <= DEC_DAYS[1])) | (
        (day >= JAN_FEB_DAYS[0]) & (day <= JAN_FEB_DAYS[1])
    )


def _season_windows(series: DailySeries, season: Season) -> np.ndarray:
    """Seasonal daily values, one row per complete season.

    JJA rows are calendar years; DJF rows are July-June windows, aligned with
    the annual minima blocks.
    """
    if season is Season.JJA:
        return series.by_year()[:, season_mask(season)]
    n_windows = series.n_years - 1
    if n_windows < 1:
        raise ValueError("a complete DJF season needs at least two years of data")
    start = JULY_FIRST - 1
    windows = series.values[start : start + n_windows * DAYS_PER_YEAR].reshape(n_windows, DAYS_PER_YEAR)
    shifted_mask = np.roll(season_mask(season), -start)
    return windows[:, shifted_mask]


def seasonal_stats(series: DailySeries, season: Season | str) -> SeasonalStats:
    """Pooled mean and standard deviation (``N - 1`` denominator) of a season."""
    season = Season(season)
    pooled = _season_windows(series, season).ravel()
    if pooled.size < 2:
        raise ValueError("not enough seasonal days")
    return SeasonalStats(season, float(np.mean(pooled)), float(np.std(pooled, ddof=1)), int(pooled.size))


@dataclass(frozen=True, eq=False)
class SeasonalAggregates:
    """Per-season count, mean and centred sum of squares.

    Rows align with the annual extremes of the matching orientation, so a
    resampled index sequence can be applied to both.
    """

    season: Season
    counts: np.ndarray
    means: np.ndarray
    m2: np.ndarray

    def pooled(self, indices=None) -> SeasonalStats:
        """Combine rows (optionally a resampled selection) into pooled statistics."""
        idx = slice(None) if indices is None else np.asarray(indices)
        counts = self.counts[idx]
        means = self.means[idx]
        total = counts.sum()
        grand = float(np.dot(counts, means) / total)
        m2 = float(self.m2[idx].sum() + np.dot(counts, (means - grand) ** 2))
        return SeasonalStats(self.season, grand, math.sqrt(m2 / (total - 1)), int(total))


def seasonal_aggregates(series: DailySeries, season: Season | str) -> SeasonalAggregates:
    season = Season(season)
    rows = _season_windows(series, season)
    means = rows.mean(axis=1)
    m2 = ((rows - means[:, None]) ** 2).sum(axis=1)
    counts = np.full(rows.shape[0], rows.shape[1], dtype=float)
    return SeasonalAggregates(season, counts, means, m2)
