"""Weighted CRPS in its quantile and threshold representations.

Both integrals are evaluated with the midpoint rule. With uniform weights the
two representations coincide with the kernel form of the CRPS; under
non-uniform weights they generally differ, so the tag of the returned score
records which representation produced it.
"""

import logging
from collections.abc import Callable
from typing import Optional

import numpy as np
from scipy import optimize

from ..errors import InvalidQuadrature, NonMonotoneQuantileFunction, RangeExcludesObservation
from .models import QuantileWeight, ScoreValue, ThresholdWeight

logger = logging.getLogger(__name__)

DEFAULT_GRID = 4096
MIN_GRID = 16
RANGE_HALF_WIDTH = 10.0
SPREAD_LEVELS = (0.16, 0.84)
BRACKET_DOUBLINGS = 64

Handle = Callable[[np.ndarray], np.ndarray]


def _evaluate(handle: Handle, nodes: np.ndarray) -> np.ndarray:
    values = np.asarray(handle(nodes), dtype=float)
    if values.shape != nodes.shape:
        # Scalar-only handles
        values = np.array([float(handle(x)) for x in nodes])
    return values


def _check_weight(weights: np.ndarray) -> np.ndarray:
    if np.any(weights < 0):
        raise InvalidQuadrature("Weight function returned negative values")
    return weights


def empirical_cdf(draws: np.ndarray) -> Handle:
    """Right-continuous empirical distribution function of a univariate sample."""
    support = np.sort(np.asarray(draws, dtype=float).reshape(-1))
    n = support.size

    def cdf(z: np.ndarray) -> np.ndarray:
        return np.searchsorted(support, z, side="right") / n

    return cdf


def empirical_quantile_function(draws: np.ndarray) -> Handle:
    """Left-continuous inverse of the empirical distribution function."""
    support = np.sort(np.asarray(draws, dtype=float).reshape(-1))
    n = support.size

    def quantile(alpha: np.ndarray) -> np.ndarray:
        index = np.clip(np.ceil(n * np.asarray(alpha, dtype=float)).astype(int), 1, n) - 1
        return support[index]

    return quantile


def crps_quantile_weighted(
    inv_cdf: Handle,
    y: float,
    weight: Optional[QuantileWeight] = None,
    grid: int = DEFAULT_GRID,
) -> ScoreValue:
    """Quantile-weighted CRPS, the integral over alpha of QS_alpha(F^-1(alpha), y) nu(alpha).

    Args:
        inv_cdf: Quantile function; must accept an array of levels in (0, 1)
        y: Observation
        weight: Quantile weight nu (uniform by default)
        grid: Number of midpoint nodes on (0, 1)

    Raises:
        InvalidQuadrature: grid < 16 or a negative weight
        NonMonotoneQuantileFunction: The sampled quantiles decrease
    """
    if grid < MIN_GRID:
        raise InvalidQuadrature(f"Quantile quadrature needs at least {MIN_GRID} nodes, got {grid}")
    weight = weight or QuantileWeight()

    alphas = (np.arange(grid) + 0.5) / grid
    q = _evaluate(inv_cdf, alphas)
    steps = np.diff(q)
    tolerance = 1e-12 * (1.0 + np.abs(q[1:]))
    decreasing = np.flatnonzero(steps < -tolerance)
    if decreasing.size:
        raise NonMonotoneQuantileFunction(float(alphas[decreasing[0] + 1]))

    quantile_scores = 2.0 * ((y <= q).astype(float) - alphas) * (q - y)
    value = float(np.mean(quantile_scores * _check_weight(weight(alphas))))
    return ScoreValue(f"CRPS({weight.tag},quantile)", value)


def _locate(cdf: Handle, level: float, lower: float, upper: float) -> float:
    return float(optimize.brentq(lambda z: _evaluate(cdf, np.array([z]))[0] - level, lower, upper))


def spread_estimate(cdf: Handle, y: float) -> tuple[float, float]:
    """Spread and median of a distribution function, found by bisection.

    The spread is half the distance between the 0.16 and 0.84 quantiles, which
    is sigma for a Gaussian.

    Returns:
        (spread, median)

    Raises:
        InvalidQuadrature: The central 68% of the mass cannot be bracketed
    """
    lower, upper = y - 1.0, y + 1.0
    for _ in range(BRACKET_DOUBLINGS):
        if _evaluate(cdf, np.array([lower]))[0] <= SPREAD_LEVELS[0]:
            break
        lower = y - 2.0 * (y - lower)
    else:
        raise InvalidQuadrature(f"Cannot bracket the {SPREAD_LEVELS[0]} quantile below {y}")
    for _ in range(BRACKET_DOUBLINGS):
        if _evaluate(cdf, np.array([upper]))[0] >= SPREAD_LEVELS[1]:
            break
        upper = y + 2.0 * (upper - y)
    else:
        raise InvalidQuadrature(f"Cannot bracket the {SPREAD_LEVELS[1]} quantile above {y}")

    low_q, high_q = (_locate(cdf, level, lower, upper) for level in SPREAD_LEVELS)
    return 0.5 * (high_q - low_q), _locate(cdf, 0.5, lower, upper)


def _default_range(cdf: Handle, y: float, scale: Optional[float]) -> tuple[float, float]:
    if scale is not None:
        half_width = RANGE_HALF_WIDTH * scale
    else:
        spread, median = spread_estimate(cdf, y)
        # widen to cover the bulk of the forecast when y sits far out or F is a point mass
        half_width = max(RANGE_HALF_WIDTH * spread, 2.0 * abs(median - y))
        if half_width <= 0:
            half_width = 1.0
        logger.debug(f"Threshold range y +/- {half_width:.6g} from spread {spread:.6g}")
    return y - half_width, y + half_width


def _threshold_nodes(y: float, z_range: tuple[float, float], grid: int) -> tuple[np.ndarray, float]:
    if grid < MIN_GRID:
        raise InvalidQuadrature(f"Threshold quadrature needs at least {MIN_GRID} nodes, got {grid}")
    lower, upper = map(float, z_range)
    if not lower < upper:
        raise InvalidQuadrature(f"Empty integration range {z_range}")
    if not lower <= y <= upper:
        raise RangeExcludesObservation(y, (lower, upper))
    width = (upper - lower) / grid
    return lower + (np.arange(grid) + 0.5) * width, width


def crps_threshold_weighted(
    cdf: Handle,
    y: float,
    weight: Optional[ThresholdWeight] = None,
    z_range: Optional[tuple[float, float]] = None,
    grid: int = DEFAULT_GRID,
    scale: Optional[float] = None,
) -> ScoreValue:
    """Threshold-weighted CRPS, the integral over z of (F(z) - 1{y <= z})^2 u(z).

    Args:
        cdf: Distribution function; must accept an array of thresholds
        y: Observation
        weight: Threshold weight u (uniform by default)
        z_range: Truncation interval; defaults to y +/- 10 * scale, with the
            spread taken from ``spread_estimate`` when ``scale`` is omitted
        grid: Number of midpoint nodes
        scale: Spread used for the default range

    Raises:
        RangeExcludesObservation: y lies outside ``z_range``
    """
    weight = weight or ThresholdWeight()
    if z_range is None:
        z_range = _default_range(cdf, y, scale)
    nodes, width = _threshold_nodes(y, z_range, grid)
    probs = _evaluate(cdf, nodes)
    brier = (probs - (y <= nodes).astype(float)) ** 2
    value = float(width * np.sum(brier * _check_weight(weight(nodes))))
    return ScoreValue(f"CRPS({weight.tag},threshold)", value)


def crps_threshold_split(
    cdf: Handle,
    y: float,
    z_range: Optional[tuple[float, float]] = None,
    grid: int = DEFAULT_GRID,
    scale: Optional[float] = None,
) -> tuple[float, float]:
    """The two penalised areas of the unweighted threshold CRPS.

    Returns:
        (area of F^2 left of y, area of (1 - F)^2 right of y); they sum to the CRPS
    """
    if z_range is None:
        z_range = _default_range(cdf, y, scale)
    nodes, width = _threshold_nodes(y, z_range, grid)
    probs = _evaluate(cdf, nodes)
    left = nodes < y
    return float(width * np.sum(probs[left] ** 2)), float(width * np.sum((1.0 - probs[~left]) ** 2))
