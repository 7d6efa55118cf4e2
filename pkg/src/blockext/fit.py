"""GEV parameter estimation by maximum likelihood and probability weighted moments.

Both estimators work on maxima. Minima are fitted by negating the data,
fitting maxima and mapping the location back (``mu -> -mu``), which leaves the
scale and shape estimates bit-for-bit identical to the negated-data fit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize
from scipy.special import gamma as gamma_fn

from .blocks import BlockExtremes
from .gevcore import GUMBEL_TOL, GevParams, Orientation, nll_maxima

__all__ = [
    "FitError",
    "FitResult",
    "Method",
    "PwmMoments",
    "fit",
    "fit_ml",
    "fit_pwm",
    "pwm_moments",
    "pwm_to_params",
]

EULER_GAMMA = 0.5772156649015329
MIN_OBS = 10
ML_MAXITER = 10_000
ML_RTOL = 1e-10
ML_XATOL = 1e-6
# initial simplex steps: mu in units of sigma, log sigma, xi
ML_SIMPLEX_STEP = 0.1
ML_XI_START = 0.1
# Hosking's rational approximation is accurate on this shape range.
PWM_K_RANGE = (-0.5, 0.5)


class FitError(ValueError):
    """The sample cannot be fitted (degenerate or too small)."""


class Method(str, Enum):
    ML = "ml"
    PWM = "pwm"


@dataclass(frozen=True)
class FitResult:
    params: GevParams
    method: Method
    n_obs: int
    block_length: int = 1
    converged: bool = True
    nll: float | None = None
    iterations: int = 0
    message: str = ""


@dataclass(frozen=True)
class PwmMoments:
    b0: float
    b1: float
    b2: float


def _maxima_frame(extremes: BlockExtremes) -> np.ndarray:
    if extremes.orientation is Orientation.MAXIMA:
        return extremes.values
    return -extremes.values


def _check_size(n: int, method: Method) -> None:
    if n < 3:
        raise FitError(f"{method.value} fit needs at least 3 observations, got {n}")
    if n < MIN_OBS:
        warnings.warn(
            f"fitting a GEV to only {n} observations", RuntimeWarning, stacklevel=3
        )


def _to_orientation(mu: float, sigma: float, xi: float, orientation: Orientation) -> GevParams:
    if orientation is Orientation.MAXIMA:
        return GevParams(mu, sigma, xi, Orientation.MAXIMA)
    return GevParams(-mu, sigma, xi, Orientation.MINIMA)


def _objective(theta: np.ndarray, y: np.ndarray) -> float:
    mu, log_sigma, xi = theta
    return nll_maxima(mu, math.exp(log_sigma), xi, y, penalize=True)


def _start_point(y: np.ndarray) -> np.ndarray:
    sd = float(np.std(y, ddof=1))
    if not sd > 0:
        raise FitError("sample has zero variance")
    sigma0 = sd * math.sqrt(6.0) / math.pi
    mu0 = float(np.mean(y)) - EULER_GAMMA * sigma0
    return np.array([mu0, math.log(sigma0), ML_XI_START])


def _initial_simplex(theta0: np.ndarray) -> np.ndarray:
    steps = ML_SIMPLEX_STEP * np.array([math.exp(theta0[1]), 1.0, 1.0])
    return np.vstack([theta0, theta0 + np.diag(steps)])


def fit_ml(
    extremes: BlockExtremes,
    start: GevParams | None = None,
    maxiter: int = ML_MAXITER,
) -> FitResult:
    """Maximum likelihood fit by Nelder-Mead over ``(mu, log sigma, xi)``.

    The default start is the Gumbel method-of-moments point with ``xi = 0.1``.
    ``xi`` is unconstrained. Outside the support the objective is a large
    finite penalty so the simplex can step back in.

    Args:
        extremes: Block maxima or minima.
        start: Optional starting parameters (same orientation as the data),
            e.g. a full-sample estimate when refitting bootstrap replicates.
        maxiter: Iteration cap for the simplex.

    Returns:
        A :class:`FitResult`; on hitting the iteration cap ``converged`` is
        False and the best point found is returned.
    """
    y = _maxima_frame(extremes)
    _check_size(y.size, Method.ML)
    if start is None:
        theta0 = _start_point(y)
    else:
        if start.orientation is not extremes.orientation:
            raise FitError("start parameters have the wrong orientation")
        s = start.as_maxima()
        theta0 = np.array([s.mu, math.log(s.sigma), s.xi])
    f0 = _objective(theta0, y)
    fatol = ML_RTOL * (abs(f0) + ML_RTOL) if f0 < 1e9 else ML_RTOL
    res = minimize(
        _objective,
        theta0,
        args=(y,),
        method="Nelder-Mead",
        options={
            "maxiter": maxiter,
            "maxfev": 2 * maxiter,
            "xatol": ML_XATOL,
            "fatol": fatol,
            "initial_simplex": _initial_simplex(theta0),
        },
    )
    mu, log_sigma, xi = (float(v) for v in res.x)
    sigma = math.exp(log_sigma)
    nll = nll_maxima(mu, sigma, xi, y)
    converged = bool(res.success) and math.isfinite(nll) and sigma > 0
    return FitResult(
        params=_to_orientation(mu, sigma, xi, extremes.orientation),
        method=Method.ML,
        n_obs=int(y.size),
        block_length=extremes.block_length,
        converged=converged,
        nll=nll,
        iterations=int(res.nit),
        message=str(res.message),
    )


def _pwm_sorted(y_sorted: np.ndarray) -> PwmMoments:
    n = y_sorted.size
    j = np.arange(1, n + 1, dtype=float)
    w1 = (j - 1) / (n - 1)
    w2 = ((j - 1) * (j - 2)) / ((n - 1) * (n - 2))
    return PwmMoments(
        b0=float(np.sum(y_sorted) / n),
        b1=float(np.sum(w1 * y_sorted) / n),
        b2=float(np.sum(w2 * y_sorted) / n),
    )


def pwm_moments(extremes: BlockExtremes | np.ndarray) -> PwmMoments:
    """Unbiased sample probability weighted moments ``b0, b1, b2``.

    With ascending order statistics ``y_(1) <= ... <= y_(n)``,
    ``b_r = n^-1 sum_j y_(j) prod_{l=1..r} (j - l) / (n - l)``.
    """
    values = np.asarray(getattr(extremes, "values", extremes), dtype=float)
    if values.size < 3:
        raise FitError(f"probability weighted moments need at least 3 values, got {values.size}")
    return _pwm_sorted(np.sort(values))


def pwm_to_params(m: PwmMoments) -> tuple[float, float, float]:
    """Hosking's closed form; returns maxima-frame ``(mu, sigma, xi)``.

    Raises:
        FitError: If ``3 b2 - b0 == 0`` or ``2 b1 - b0 <= 0``.
    """
    denom = 3.0 * m.b2 - m.b0
    l2 = 2.0 * m.b1 - m.b0
    if denom == 0 or not l2 > 0:
        raise FitError("degenerate probability weighted moments")
    c = l2 / denom - math.log(2.0) / math.log(3.0)
    k = 7.8590 * c + 2.9554 * c * c
    if not PWM_K_RANGE[0] < k < PWM_K_RANGE[1]:
        warnings.warn(
            f"PWM shape estimate {-k:.3f} is outside the accurate range of the approximation",
            RuntimeWarning,
            stacklevel=3,
        )
    if abs(k) < GUMBEL_TOL:
        sigma = l2 / math.log(2.0)
        mu = m.b0 - EULER_GAMMA * sigma
    else:
        g = float(gamma_fn(1.0 + k))
        sigma = l2 * k / (g * (1.0 - 2.0 ** (-k)))
        mu = m.b0 + sigma * (g - 1.0) / k
    return mu, sigma, -k


def fit_pwm(extremes: BlockExtremes) -> FitResult:
    """Probability-weighted-moment fit (Hosking-type closed form)."""
    y = _maxima_frame(extremes)
    _check_size(y.size, Method.PWM)
    mu, sigma, xi = pwm_to_params(_pwm_sorted(np.sort(y)))
    params = _to_orientation(mu, sigma, xi, extremes.orientation)
    return FitResult(
        params=params,
        method=Method.PWM,
        n_obs=int(y.size),
        block_length=extremes.block_length,
        converged=True,
        nll=nll_maxima(mu, sigma, xi, y),
    )


def fit(extremes: BlockExtremes, method: Method | str = Method.ML, start: GevParams | None = None) -> FitResult:
    """Dispatch to :func:`fit_ml` or :func:`fit_pwm`."""
    method = Method(method)
    if method is Method.ML:
        return fit_ml(extremes, start=start)
    return fit_pwm(extremes)
