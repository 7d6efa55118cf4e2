"""Generalized extreme value distribution for block maxima and block minima.

Maxima follow the usual GEV distribution function

    G(y) = exp(-{1 + xi (y - mu) / sigma}_+^(-1/xi))

and minima use the mirrored convention in which a larger ``mu`` means a
warmer minimum: the same kernel evaluated at ``mu - y`` gives the
probability that the block minimum exceeds ``y``. Every minima routine here
is implemented by negation through the maxima kernel, so the duality
``survival_minima(mu, sigma, xi; y) == cdf_maxima(-mu, sigma, xi; -y)`` holds
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .blocks import BlockExtremes

__all__ = [
    "GUMBEL_TOL",
    "GevDomainError",
    "GevParams",
    "Orientation",
    "ReturnLevelQuery",
    "cdf",
    "cdf_maxima",
    "cdf_minima",
    "logpdf",
    "neg_log_likelihood",
    "pdf",
    "quantile",
    "return_level",
    "return_level_array",
    "sample",
    "survival_minima",
]

# |xi| below this uses the Gumbel (xi = 0) branch of every formula.
GUMBEL_TOL = 1e-8

# Base penalty returned by the optimisation objective outside the support.
SUPPORT_PENALTY = 1e10
_EXP_CAP = 700.0


class GevDomainError(ValueError):
    """Invalid parameters or arguments for a GEV evaluation."""


class Orientation(str, Enum):
    MAXIMA = "max"
    MINIMA = "min"

    @classmethod
    def parse(cls, value: str | Orientation) -> Orientation:
        if isinstance(value, Orientation):
            return value
        key = str(value).strip().lower()
        aliases = {
            "max": cls.MAXIMA,
            "maxima": cls.MAXIMA,
            "warm": cls.MAXIMA,
            "min": cls.MINIMA,
            "minima": cls.MINIMA,
            "cold": cls.MINIMA,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown orientation {value!r}") from None


@dataclass(frozen=True)
class GevParams:
    """Location ``mu``, scale ``sigma`` and shape ``xi`` with a tail orientation."""

    mu: float
    sigma: float
    xi: float
    orientation: Orientation = Orientation.MAXIMA

    def __post_init__(self) -> None:
        for name in ("mu", "sigma", "xi"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise GevDomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.sigma <= 0:
            raise GevDomainError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "orientation", Orientation.parse(self.orientation))

    @property
    def is_gumbel(self) -> bool:
        return abs(self.xi) < GUMBEL_TOL

    def mirror(self) -> GevParams:
        """Parameters of the negated variable in the opposite orientation."""
        other = (
            Orientation.MINIMA
            if self.orientation is Orientation.MAXIMA
            else Orientation.MAXIMA
        )
        return GevParams(-self.mu, self.sigma, self.xi, other)

    def as_maxima(self) -> GevParams:
        return self if self.orientation is Orientation.MAXIMA else self.mirror()

    @property
    def support(self) -> tuple[float, float]:
        """Closed interval (lower, upper) outside which the density vanishes."""
        if self.is_gumbel:
            return (-math.inf, math.inf)
        bound = self.mu - self.sigma / self.xi
        if self.orientation is Orientation.MAXIMA:
            return (bound, math.inf) if self.xi > 0 else (-math.inf, bound)
        # mirrored: the minima endpoint is mu + sigma / xi
        bound = self.mu + self.sigma / self.xi
        return (-math.inf, bound) if self.xi > 0 else (bound, math.inf)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.mu, self.sigma, self.xi)


@dataclass(frozen=True)
class ReturnLevelQuery:
    """An ``r``-year return period evaluated for ``b``-year blocks (p = b / r)."""

    return_period: float
    block_length: float = 1.0

    def __post_init__(self) -> None:
        r = float(self.return_period)
        b = float(self.block_length)
        if not (math.isfinite(r) and math.isfinite(b)) or b < 1:
            raise GevDomainError(f"invalid block length {b} or return period {r}")
        if not r > b:
            raise GevDomainError(
                f"return period {r} must exceed the block length {b}"
            )
        object.__setattr__(self, "return_period", r)
        object.__setattr__(self, "block_length", b)

    @property
    def p(self) -> float:
        return self.block_length / self.return_period


def _as_finite_array(y) -> tuple[np.ndarray, bool]:
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise GevDomainError("evaluation points must be finite")
    return arr, arr.ndim == 0


def _out(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


def _require(params: GevParams, orientation: Orientation) -> None:
    if not isinstance(params, GevParams):
        raise GevDomainError(f"expected GevParams, got {type(params).__name__}")
    if params.orientation is not orientation:
        raise GevDomainError(
            f"expected {orientation.name.lower()} parameters, got {params.orientation.name.lower()}"
        )


def _tail_term(mu, sigma, xi, y):
    """Return ``{1 + xi z}_+^(-1/xi)`` (``exp(-z)`` on the Gumbel branch).

    Broadcasts over array-valued parameters; the Gumbel switch is per element.
    """
    mu, sigma, xi, y = np.broadcast_arrays(
        np.asarray(mu, float), np.asarray(sigma, float), np.asarray(xi, float), np.asarray(y, float)
    )
    z = (y - mu) / sigma
    gumbel = np.abs(xi) < GUMBEL_TOL
    safe_xi = np.where(gumbel, 1.0, xi)
    xz = safe_xi * z
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        tail = np.exp(-np.log1p(xz) / safe_xi)
    outside = xz <= -1.0
    tail = np.where(outside, np.where(safe_xi > 0, np.inf, 0.0), tail)
    with np.errstate(over="ignore"):
        return np.where(gumbel, np.exp(-z), tail)


def _quantile_from_tail(mu, sigma, xi, w):
    """Invert ``_tail_term``: the ``y`` with tail term ``w`` (``w = -log G``)."""
    mu, sigma, xi, w = np.broadcast_arrays(
        np.asarray(mu, float), np.asarray(sigma, float), np.asarray(xi, float), np.asarray(w, float)
    )
    gumbel = np.abs(xi) < GUMBEL_TOL
    safe_xi = np.where(gumbel, 1.0, xi)
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    general = mu + sigma * np.expm1(-safe_xi * log_w) / safe_xi
    return np.where(gumbel, mu - sigma * log_w, general)


def cdf_maxima(params: GevParams, y):
    """Distribution function of block maxima, ``P(M <= y)``.

    Returns 0 below a finite lower endpoint (xi > 0) and 1 at or above a
    finite upper endpoint (xi < 0).
    """
    _require(params, Orientation.MAXIMA)
    arr, scalar = _as_finite_array(y)
    tail = _tail_term(params.mu, params.sigma, params.xi, arr)
    return _out(np.exp(-tail), scalar)


def survival_minima(params: GevParams, y):
    """Probability that the block minimum exceeds ``y``.

    This is the mirrored GEV expression for minima, which is nonincreasing in
    ``y`` and equals 1 at the lower endpoint ``mu + sigma / xi`` (xi < 0).
    """
    _require(params, Orientation.MINIMA)
    arr, scalar = _as_finite_array(y)
    return _out(cdf_maxima(params.mirror(), -arr), scalar)


def cdf_minima(params: GevParams, y):
    """Distribution function of block minima, ``1 - survival_minima``."""
    arr, scalar = _as_finite_array(y)
    return _out(1.0 - survival_minima(params, arr), scalar)


def cdf(params: GevParams, y):
    """``P(Y <= y)`` for either orientation."""
    if params.orientation is Orientation.MAXIMA:
        return cdf_maxima(params, y)
    return cdf_minima(params, y)


def logpdf(params: GevParams, y):
    """Log density; ``-inf`` outside the support."""
    arr, scalar = _as_finite_array(y)
    if params.orientation is Orientation.MINIMA:
        return _out(logpdf(params.mirror(), -arr), scalar)
    return _out(_logpdf_maxima(params.mu, params.sigma, params.xi, arr), scalar)


def pdf(params: GevParams, y):
    arr, scalar = _as_finite_array(y)
    return _out(np.exp(logpdf(params, arr)), scalar)


def _logpdf_maxima(mu: float, sigma: float, xi: float, y: np.ndarray) -> np.ndarray:
    z = (y - mu) / sigma
    if abs(xi) < GUMBEL_TOL:
        return -math.log(sigma) - z - np.exp(-z)
    xz = xi * z
    inside = xz > -1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        log_t = np.log1p(np.where(inside, xz, 0.0))
        out = -math.log(sigma) - (1.0 + 1.0 / xi) * log_t - np.exp(-log_t / xi)
    return np.where(inside, out, -np.inf)


def quantile(params: GevParams, prob):
    """Inverse of :func:`cdf`: the ``y`` with ``P(Y <= y) = prob``, 0 < prob < 1."""
    arr = np.asarray(prob, dtype=float)
    if not np.all((arr > 0) & (arr < 1)):
        raise GevDomainError("probabilities must lie strictly between 0 and 1")
    if params.orientation is Orientation.MAXIMA:
        out = _quantile_from_tail(params.mu, params.sigma, params.xi, -np.log(arr))
    else:
        mirrored = params.mirror()
        out = -_quantile_from_tail(mirrored.mu, mirrored.sigma, mirrored.xi, -np.log1p(-arr))
    return _out(out, arr.ndim == 0)


def _exceedance_level(params: GevParams, p):
    """Level whose block extreme is more extreme with probability ``p``."""
    w = -np.log1p(-np.asarray(p, dtype=float))
    if params.orientation is Orientation.MAXIMA:
        return _quantile_from_tail(params.mu, params.sigma, params.xi, w)
    mirrored = params.mirror()
    return -_quantile_from_tail(mirrored.mu, mirrored.sigma, mirrored.xi, w)


def return_level(params: GevParams, query, block_length: float = 1.0):
    """The ``r``-year return level.

    For maxima this is the ``1 - p`` quantile with ``p = b / r``; for minima it
    is the ``p`` quantile, so longer return periods give colder levels.

    Args:
        params: Fitted or assumed GEV parameters.
        query: A :class:`ReturnLevelQuery`, or a return period (scalar or
            array) in years.
        block_length: Block length ``b`` in years; ignored when ``query`` is a
            :class:`ReturnLevelQuery`.

    Returns:
        The return level(s) in the units of the data.
    """
    if isinstance(query, ReturnLevelQuery):
        return float(_exceedance_level(params, query.p))
    periods = np.asarray(query, dtype=float)
    b = float(block_length)
    if b < 1 or not np.all(np.isfinite(periods)) or not np.all(periods > b):
        raise GevDomainError("return periods must exceed the block length (p = b/r in (0, 1))")
    return _out(_exceedance_level(params, b / periods), periods.ndim == 0)


def return_level_array(mu, sigma, xi, orientation: Orientation | str, periods, block_length: float = 1.0) -> np.ndarray:
    """Return levels for many parameter sets at once.

    ``mu``, ``sigma`` and ``xi`` are scalars or 1-D arrays of length K,
    ``periods`` has length P; the result is ``(K, P)`` (``K = 1`` for scalar
    parameters). Rows with NaN parameters give NaN.
    """
    periods = np.asarray(periods, dtype=float)
    if not np.all(periods > block_length):
        raise GevDomainError("return periods must exceed the block length")
    w = -np.log1p(-block_length / periods)[None, :]
    mu = np.atleast_1d(np.asarray(mu, float))[:, None]
    sigma = np.atleast_1d(np.asarray(sigma, float))[:, None]
    xi = np.atleast_1d(np.asarray(xi, float))[:, None]
    if Orientation.parse(orientation) is Orientation.MAXIMA:
        return _quantile_from_tail(mu, sigma, xi, w)
    return -_quantile_from_tail(-mu, sigma, xi, w)


def _maxima_values(params: GevParams, extremes) -> np.ndarray:
    values = np.asarray(getattr(extremes, "values", extremes), dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise GevDomainError("need a nonempty one-dimensional sample")
    if not np.all(np.isfinite(values)):
        raise GevDomainError("sample values must be finite")
    orientation = getattr(extremes, "orientation", None)
    if orientation is not None and Orientation.parse(orientation) is not params.orientation:
        raise GevDomainError("orientation of parameters and extremes differ")
    return values if params.orientation is Orientation.MAXIMA else -values


def nll_maxima(mu: float, sigma: float, xi: float, y: np.ndarray, penalize: bool = False) -> float:
    """Negative log-likelihood of maxima ``y``; the kernel used by the fitters.

    Outside the support this returns ``inf``, or with ``penalize`` the finite
    value ``SUPPORT_PENALTY + sum(violation ** 2)`` where a violation is how
    far ``1 + xi z`` falls below zero.
    """
    # hot path of every fit: plain ndarray methods, exponents capped instead of errstate
    z = (y - mu) / sigma
    n = y.size
    if abs(xi) < GUMBEL_TOL:
        return float(n * math.log(sigma) + z.sum() + np.exp(np.minimum(-z, _EXP_CAP)).sum())
    xz = z * xi
    if xz.min() <= -1.0:
        if not penalize:
            return math.inf
        gap = np.minimum(1.0 + xz, 0.0)
        return SUPPORT_PENALTY + float(gap @ gap)
    log_t = np.log1p(xz)
    tail = np.exp(np.minimum(log_t * (-1.0 / xi), _EXP_CAP)).sum()
    return float(n * math.log(sigma) + (1.0 + 1.0 / xi) * log_t.sum() + tail)


def neg_log_likelihood(params: GevParams, extremes: BlockExtremes | np.ndarray) -> float:
    """Sum of negative log densities; ``inf`` if any observation lies outside the support."""
    y = _maxima_values(params, extremes)
    m = params.as_maxima()
    return nll_maxima(m.mu, m.sigma, m.xi, y)


def sample(params: GevParams, n: int, seed: int | np.random.Generator | None = None) -> BlockExtremes:
    """Draw ``n`` i.i.d. block extremes by inverse-CDF sampling.

    Uniform variates come from ``numpy.random.default_rng(seed)`` on the open
    interval (0, 1), so the same seed always reproduces the same draws.
    """
    from .blocks import BlockExtremes

    if int(n) <= 0:
        raise GevDomainError("n must be positive")
    rng = np.random.default_rng(seed)
    u = rng.uniform(np.nextafter(0.0, 1.0), 1.0, size=int(n))
    return BlockExtremes(quantile(params, u), params.orientation, 1)
