"""Bootstrap standard errors, envelopes and two-sample p-values.

Years are resampled either one at a time (simple) or as overlapping
wrap-around blocks of ``b`` consecutive years (circular block). Replicate
``k`` of stream ``s`` always draws from
``SeedSequence(seed, spawn_key=(s, k))``, so the result does not depend on
how replicates are distributed over workers.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._parallel import pmap
from .blocks import BlockExtremes
from .fit import FitError, FitResult, Method, fit
from .gevcore import GevParams, return_level_array

__all__ = [
    "BootstrapConfig",
    "BootstrapResult",
    "PValue",
    "Scheme",
    "bootstrap_fit",
    "bootstrap_pvalue",
    "circular_block_indices",
    "paired_pvalue",
    "replicate_rng",
    "resample",
    "resample_indices",
    "significance_mark",
    "two_state_pvalue",
]

MAX_FAILURE_FRACTION = 0.05
STRONG_P = 0.02
WEAK_P = 0.10
PARAM_NAMES = ("mu", "sigma", "log_sigma", "xi")


class Scheme(str, Enum):
    SIMPLE = "simple"
    CIRCULAR_BLOCK = "circular-block"


@dataclass(frozen=True)
class BootstrapConfig:
    """Resampling settings.

    ``block_length`` is the bootstrap block length in years, unrelated to the
    GEV block length of the extremes being resampled.
    """

    n_replicates: int = 1000
    block_length: int = 1
    seed: int = 0
    scheme: Scheme = Scheme.CIRCULAR_BLOCK
    level: float = 0.90
    workers: int = 1

    def __post_init__(self) -> None:
        if int(self.n_replicates) < 1:
            raise ValueError("need at least one bootstrap replicate")
        if int(self.block_length) < 1:
            raise ValueError("bootstrap block length must be positive")
        if not 0 < self.level < 1:
            raise ValueError("envelope level must lie in (0, 1)")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


def replicate_rng(seed: int, stream: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(replicate))))


def circular_block_indices(starts, block_length: int, n: int) -> np.ndarray:
    """Concatenate wrap-around blocks beginning at ``starts`` and truncate to ``n``."""
    starts = np.asarray(starts, dtype=np.int64)
    idx = (starts[:, None] + np.arange(block_length)[None, :]) % n
    return idx.ravel()[:n]


def resample_indices(n: int, block_length: int, rng: np.random.Generator, scheme: Scheme | str = Scheme.CIRCULAR_BLOCK) -> np.ndarray:
    """One bootstrap index sequence of length ``n`` (0-based).

    The circular scheme draws ``ceil(n / b)`` block starts uniformly from the
    ``n`` overlapping blocks; with ``b = 1`` it consumes the generator exactly
    like the simple scheme and returns the same indices.
    """
    if block_length > n:
        raise ValueError(f"bootstrap block length {block_length} exceeds {n} years")
    if Scheme(scheme) is Scheme.SIMPLE:
        return rng.integers(0, n, size=n)
    n_blocks = -(-n // block_length)
    starts = rng.integers(0, n, size=n_blocks)
    return circular_block_indices(starts, block_length, n)


def resample(extremes_per_cell: Sequence | np.ndarray | int, config: BootstrapConfig, replicate: int = 0, stream: int = 0) -> np.ndarray:
    """Index sequence shared by all cells for one replicate.

    Args:
        extremes_per_cell: Aligned per-cell annual series (all the same
            length), a 2-D array with years along the last axis, or simply
            the number of years.
        config: Resampling settings.
        replicate: Replicate number.
        stream: Independent stream, e.g. one per climate state.
    """
    if isinstance(extremes_per_cell, (int, np.integer)):
        n = int(extremes_per_cell)
    else:
        lengths = {len(getattr(cell, "values", cell)) for cell in extremes_per_cell}
        if len(lengths) != 1:
            raise ValueError("cells must share the same years")
        n = lengths.pop()
    block = config.block_length if config.scheme is Scheme.CIRCULAR_BLOCK else 1
    return resample_indices(n, block, replicate_rng(config.seed, stream, replicate), config.scheme)


@dataclass(frozen=True)
class _ReplicateFit:
    extremes: BlockExtremes
    config: BootstrapConfig
    method: Method
    start: GevParams | None
    stream: int

    def __call__(self, k: int) -> tuple[float, float, float]:
        idx = resample(self.extremes.n_blocks, self.config, k, self.stream)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                result = fit(self.extremes.take(idx), self.method, start=self.start)
        except FitError:
            return (math.nan, math.nan, math.nan)
        if not result.converged:
            return (math.nan, math.nan, math.nan)
        return result.params.as_tuple()


@dataclass(frozen=True, eq=False)
class BootstrapResult:
    """Replicate estimates of one fit.

    ``estimates`` has one row ``(mu, sigma, xi)`` per replicate; rows of
    replicates that failed to fit are NaN, so replicate ``k`` of two results
    built with the same config can be paired by row.
    """

    point: FitResult
    config: BootstrapConfig
    estimates: np.ndarray
    stream: int = 0
    return_periods: tuple[float, ...] = field(default=(20.0, 50.0, 100.0))

    @property
    def orientation(self):
        return self.point.params.orientation

    @property
    def valid(self) -> np.ndarray:
        return np.all(np.isfinite(self.estimates), axis=1)

    @property
    def n_failed(self) -> int:
        return int((~self.valid).sum())

    @property
    def failure_fraction(self) -> float:
        return self.n_failed / self.estimates.shape[0]

    @property
    def unreliable(self) -> bool:
        return self.failure_fraction > MAX_FAILURE_FRACTION

    def replicate_params(self) -> list[GevParams]:
        return [GevParams(*row, self.orientation) for row in self.estimates[self.valid]]

    def quantity(self, name: str | float) -> np.ndarray:
        """Per-replicate values of a parameter name or of the return level at a period."""
        return _quantity(self.estimates, self.orientation, self.point.block_length, name)

    def point_quantity(self, name: str | float) -> float:
        row = np.array([self.point.params.as_tuple()])
        return float(_quantity(row, self.orientation, self.point.block_length, name)[0])

    def return_levels(self, periods) -> np.ndarray:
        e = self.estimates
        return return_level_array(e[:, 0], e[:, 1], e[:, 2], self.orientation, periods, self.point.block_length)

    def standard_error(self, name: str | float) -> float:
        values = self.quantity(name)
        values = values[np.isfinite(values)]
        return float(np.std(values, ddof=1)) if values.size > 1 else math.nan

    def envelope(self, name: str | float, level: float | None = None) -> tuple[float, float]:
        level = self.config.level if level is None else level
        values = self.quantity(name)
        values = values[np.isfinite(values)]
        if values.size == 0:
            return (math.nan, math.nan)
        tail = (1.0 - level) / 2.0
        lo, hi = np.quantile(values, [tail, 1.0 - tail])
        return (float(lo), float(hi))

    @property
    def standard_errors(self) -> dict[str, float]:
        names = list(PARAM_NAMES) + list(self.return_periods)
        return {_label(n): self.standard_error(n) for n in names}

    @property
    def quantile_envelopes(self) -> dict[str, tuple[float, float]]:
        names = list(PARAM_NAMES) + list(self.return_periods)
        return {_label(n): self.envelope(n) for n in names}


def _label(name: str | float) -> str:
    return name if isinstance(name, str) else f"rl_{float(name):g}"


def _quantity(estimates: np.ndarray, orientation, block_length: int, name: str | float) -> np.ndarray:
    if isinstance(name, str):
        if name == "mu":
            return estimates[:, 0]
        if name == "sigma":
            return estimates[:, 1]
        if name == "log_sigma":
            return np.log(estimates[:, 1])
        if name == "xi":
            return estimates[:, 2]
        raise ValueError(f"unknown quantity {name!r}")
    e = estimates
    return return_level_array(e[:, 0], e[:, 1], e[:, 2], orientation, [float(name)], block_length)[:, 0]


def bootstrap_fit(
    extremes: BlockExtremes,
    config: BootstrapConfig,
    method: Method | str = Method.ML,
    stream: int = 0,
    point: FitResult | None = None,
    return_periods: Sequence[float] = (20.0, 50.0, 100.0),
) -> BootstrapResult:
    """Refit resampled extremes ``config.n_replicates`` times.

    ML replicates start from the full-sample estimate. Replicates that fail
    are kept as NaN rows and counted; more than 5% failures marks the result
    unreliable.
    """
    method = Method(method)
    if point is None:
        point = fit(extremes, method)
    start = point.params if method is Method.ML and point.converged else None
    job = _ReplicateFit(extremes, config, method, start, stream)
    rows = pmap(job, range(config.n_replicates), config.workers)
    estimates = np.array(rows, dtype=float).reshape(config.n_replicates, 3)
    result = BootstrapResult(point, config, estimates, stream, tuple(float(r) for r in return_periods))
    if result.unreliable:
        warnings.warn(
            f"{result.n_failed} of {config.n_replicates} bootstrap fits failed",
            RuntimeWarning,
            stacklevel=2,
        )
    return result


@dataclass(frozen=True)
class PValue:
    p: float
    delta: float
    n_replicates: int
    degenerate: bool = False

    @property
    def mark(self) -> str:
        return significance_mark(self.p, self.delta)


def bootstrap_pvalue(deltas) -> tuple[float, bool]:
    """Two-sided p-value ``2 min(#{d <= 0}, #{d >= 0}) / K`` floored at ``2 / K``.

    Returns ``(p, degenerate)``; a replicate distribution with no spread is
    flagged as degenerate.
    """
    d = np.asarray(deltas, dtype=float)
    d = d[np.isfinite(d)]
    k = d.size
    if k == 0:
        raise ValueError("no valid bootstrap replicates")
    if k < 100:
        warnings.warn(f"p-value from only {k} replicates", RuntimeWarning, stacklevel=2)
    degenerate = bool(np.all(d == d[0]))
    count = min(int((d <= 0).sum()), int((d >= 0).sum()))
    p = min(1.0, max(2.0 * count / k, 2.0 / k))
    return p, degenerate


def paired_pvalue(boot_a: BootstrapResult, boot_b: BootstrapResult, quantity: str | float) -> PValue:
    """P-value for a difference ``B - A`` from row-paired replicates."""
    if boot_a.orientation is not boot_b.orientation:
        raise ValueError("cannot compare maxima with minima")
    diffs = boot_b.quantity(quantity) - boot_a.quantity(quantity)
    delta = boot_b.point_quantity(quantity) - boot_a.point_quantity(quantity)
    p, degenerate = bootstrap_pvalue(diffs)
    return PValue(p, delta, int(np.isfinite(diffs).sum()), degenerate)


def two_state_pvalue(
    state_a: BlockExtremes,
    state_b: BlockExtremes,
    quantity: str | float,
    config: BootstrapConfig,
    method: Method | str = Method.ML,
) -> PValue:
    """Bootstrap each state independently and test whether ``quantity`` differs."""
    boot_a = bootstrap_fit(state_a, config, method, stream=0)
    boot_b = bootstrap_fit(state_b, config, method, stream=1)
    return paired_pvalue(boot_a, boot_b, quantity)


def significance_mark(p: float, delta: float) -> str:
    """``++``/``--`` for p < 0.02, ``+``/``-`` for 0.02 <= p <= 0.10, else empty."""
    if p < STRONG_P:
        strength = 2
    elif p <= WEAK_P:
        strength = 1
    else:
        return ""
    return ("+" if delta >= 0 else "-") * strength
