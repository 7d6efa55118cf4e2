"""Synthetic climate-like daily series for end-to-end checks.

value(day) = mean + amplitude * cos(2 pi (day - 196) / 365) + e(day)

with ``e`` an AR(1) process whose innovation standard deviation is
multiplied by ``winter_sd_scale`` on DJF days. Day 196 (mid July) is the warm
peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .blocks import DAYS_PER_YEAR, BlockExtremes, DailySeries, Season, Variable, season_mask
from .gevcore import GevParams, Orientation, quantile

__all__ = [
    "RegimeMixture",
    "SyntheticSpec",
    "generate_daily",
    "regime_mixture_maxima",
    "state_seed",
    "two_state_scenario",
]

WARM_PEAK_DAY = 196


@dataclass(frozen=True)
class SyntheticSpec:
    n_years: int = 1000
    annual_cycle_amplitude: float = 10.0
    annual_cycle_mean: float = 10.0
    ar1_phi: float = 0.6
    noise_sd: float = 3.0
    winter_sd_scale: float = 1.0
    seed: int = 0
    variable: Variable = Variable.TMAX
    cell_id: str = "synthetic"

    def __post_init__(self) -> None:
        if int(self.n_years) < 1:
            raise ValueError("n_years must be positive")
        if not abs(self.ar1_phi) < 1:
            raise ValueError("AR(1) coefficient must satisfy |phi| < 1")
        if not self.noise_sd > 0:
            raise ValueError("noise_sd must be positive")
        if not self.winter_sd_scale > 0:
            raise ValueError("winter_sd_scale must be positive")
        object.__setattr__(self, "variable", Variable(self.variable))


def annual_cycle(amplitude: float, mean: float) -> np.ndarray:
    day = np.arange(1, DAYS_PER_YEAR + 1)
    return mean + amplitude * np.cos(2.0 * math.pi * (day - WARM_PEAK_DAY) / DAYS_PER_YEAR)


def generate_daily(spec: SyntheticSpec) -> DailySeries:
    """Draw one daily series; identical for identical specs."""
    rng = np.random.default_rng(spec.seed)
    n_days = spec.n_years * DAYS_PER_YEAR
    day_sd = np.where(season_mask(Season.DJF), spec.noise_sd * spec.winter_sd_scale, spec.noise_sd)
    innovations = rng.standard_normal(n_days) * np.tile(day_sd, spec.n_years)
    # start from the stationary distribution of the first day's regime
    innovations[0] /= math.sqrt(1.0 - spec.ar1_phi**2)
    anomalies = lfilter([1.0], [1.0, -spec.ar1_phi], innovations)
    values = np.tile(annual_cycle(spec.annual_cycle_amplitude, spec.annual_cycle_mean), spec.n_years) + anomalies
    return DailySeries(values, cell_id=spec.cell_id, variable=spec.variable)


def state_seed(seed: int, state: int) -> int:
    """Independent seed for climate state ``state`` derived from ``seed``."""
    return int(np.random.SeedSequence([int(seed), int(state)]).generate_state(1)[0])


def two_state_scenario(base: SyntheticSpec, delta_mean: float, winter_sd_ratio: float = 1.0) -> tuple[DailySeries, DailySeries]:
    """A base state and a perturbed state with shifted mean and rescaled DJF noise.

    State A is ``generate_daily(base)``; state B uses an independent seed
    derived from ``base.seed``.
    """
    if not winter_sd_ratio > 0:
        raise ValueError("winter_sd_ratio must be positive")
    spec_b = replace(
        base,
        annual_cycle_mean=base.annual_cycle_mean + delta_mean,
        winter_sd_scale=base.winter_sd_scale * winter_sd_ratio,
        seed=state_seed(base.seed, 1),
    )
    return generate_daily(base), generate_daily(spec_b)


@dataclass(frozen=True)
class RegimeMixture:
    """Annual maxima from ordinary years plus occasional heat-wave years.

    Every year draws a bounded-tail ordinary maximum; with probability
    ``event_prob`` a heat-wave maximum is also drawn and the larger of the two
    is kept. Long blocks are dominated by the heat-wave regime, so the shape
    fitted to 1-year blocks differs from the one fitted to 10-year blocks.
    """

    ordinary: GevParams = GevParams(0.0, 1.0, -0.3)
    event: GevParams = GevParams(1.0, 1.0, 0.0)
    event_prob: float = 0.1

    def __post_init__(self) -> None:
        if not 0 <= self.event_prob <= 1:
            raise ValueError("event_prob must lie in [0, 1]")
        if self.ordinary.orientation is not Orientation.MAXIMA or self.event.orientation is not Orientation.MAXIMA:
            raise ValueError("mixture components must be maxima")


def regime_mixture_maxima(mixture: RegimeMixture, n_years: int, seed: int = 0) -> BlockExtremes:
    """Draw ``n_years`` annual maxima from ``mixture``."""
    rng = np.random.default_rng(seed)
    tiny = np.nextafter(0.0, 1.0)
    ordinary = quantile(mixture.ordinary, rng.uniform(tiny, 1.0, n_years))
    event = quantile(mixture.event, rng.uniform(tiny, 1.0, n_years))
    hit = rng.uniform(size=n_years) < mixture.event_prob
    return BlockExtremes(np.where(hit, np.maximum(ordinary, event), ordinary))
