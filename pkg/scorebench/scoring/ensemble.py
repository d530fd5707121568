"""Ensemble estimators of the CRPS, energy score and variogram score.

All estimators treat the ensemble as an empirical distribution: draw-draw
double sums are divided by N^2 rather than N(N-1). The vectorised
``*_scores`` variants score many observations against one ensemble and
compute the ensemble-only terms once.
"""

import logging
from typing import Union

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import BetaOutOfRange, DegenerateEnsemble, DimensionMismatch, NonPositiveOrder
from .models import ForecastEnsemble, ScoreValue

logger = logging.getLogger(__name__)

EnsembleLike = Union[ForecastEnsemble, np.ndarray]

# Upper bound on the number of float64 elements materialised per block
_BLOCK_ELEMENTS = 1 << 22


def _as_draws(forecast: EnsembleLike) -> np.ndarray:
    if isinstance(forecast, ForecastEnsemble):
        return forecast.draws
    return ForecastEnsemble(np.asarray(forecast, dtype=float)).draws


def _as_observations(observations: np.ndarray, d: int) -> np.ndarray:
    obs = np.asarray(observations, dtype=float)
    if obs.ndim <= 1 and d == 1:
        obs = obs.reshape(-1, 1)
    elif obs.ndim == 1:
        obs = obs[None, :]
    if obs.shape[1] != d:
        raise DimensionMismatch(f"Observations have dimension {obs.shape[1]}, ensemble has {d}")
    return obs


def _check_beta(beta: float) -> None:
    if not 0.0 < beta < 2.0:
        raise BetaOutOfRange(beta)


def _rows_per_block(width: int) -> int:
    return max(1, _BLOCK_ELEMENTS // max(width, 1))


# --- CRPS -------------------------------------------------------------------


def crps_ensembles(draws: np.ndarray, observations: np.ndarray) -> np.ndarray:
    """Kernel-form CRPS of many scalar observations against one univariate ensemble.

    Uses the sorted-sample identities sum_ij |x_i - x_j| = 2 sum_i (2i - N - 1) x_(i)
    and prefix sums for sum_i |x_i - y|, so the cost is O((N + M) log N).

    Args:
        draws: Univariate ensemble, shape (N,) or (N, 1)
        observations: Observations, shape (M,)

    Returns:
        Array of M CRPS values
    """
    x = np.sort(np.asarray(draws, dtype=float).reshape(-1))
    n = x.size
    if n < 2:
        raise DegenerateEnsemble(n)
    y = np.asarray(observations, dtype=float).reshape(-1)

    ranks = np.arange(1, n + 1)
    spread = 2.0 * np.dot(2 * ranks - n - 1, x) / (2.0 * n * n)

    prefix = np.concatenate(([0.0], np.cumsum(x)))
    below = np.searchsorted(x, y, side="right")
    sum_below = prefix[below]
    sum_above = prefix[-1] - sum_below
    accuracy = (below * y - sum_below + sum_above - (n - below) * y) / n
    return accuracy - spread


def crps_ensemble(forecast: EnsembleLike, y: float) -> ScoreValue:
    """Kernel-form CRPS, E|X - y| - 0.5 E|X - X'|, of a univariate ensemble.

    Raises:
        DegenerateEnsemble: Fewer than two draws
    """
    draws = _as_draws(forecast)
    if draws.shape[1] != 1:
        raise DimensionMismatch(f"CRPS needs a univariate ensemble, got d={draws.shape[1]}")
    return ScoreValue("CRPS", float(crps_ensembles(draws, [y])[0]))


# --- energy score -----------------------------------------------------------


def mean_pairwise_distance(draws: np.ndarray, beta: float = 1.0) -> float:
    """(1/N^2) sum_ij ||x_i - x_j||^beta, visiting each unordered pair once."""
    n = draws.shape[0]
    total = 0.0
    step = _rows_per_block(n)
    for start in range(0, n, step):
        stop = min(start + step, n)
        block = cdist(draws[start:stop], draws[start:])
        if beta != 1.0:
            block **= beta
        total += np.triu(block, k=1).sum()
    return 2.0 * total / (n * n)


def energy_scores(forecast: EnsembleLike, observations: np.ndarray, beta: float = 1.0) -> np.ndarray:
    """Energy score of many observations against one ensemble.

    Args:
        forecast: Ensemble with N >= 2 draws of dimension d
        observations: Observations, shape (M, d)
        beta: Exponent in (0, 2)

    Returns:
        Array of M scores ES_beta = E||X - y||^beta - 0.5 E||X - X'||^beta
    """
    _check_beta(beta)
    draws = _as_draws(forecast)
    n, d = draws.shape
    if n < 2:
        raise DegenerateEnsemble(n)
    obs = _as_observations(observations, d)
    if d == 1 and beta == 1.0:
        return crps_ensembles(draws, obs[:, 0])

    spread = 0.5 * mean_pairwise_distance(draws, beta)
    accuracy = np.empty(obs.shape[0])
    step = _rows_per_block(n)
    for start in range(0, obs.shape[0], step):
        block = cdist(obs[start:start + step], draws)
        if beta != 1.0:
            block **= beta
        accuracy[start:start + step] = block.mean(axis=1)
    return accuracy - spread


def energy_score(forecast: EnsembleLike, y: np.ndarray, beta: float = 1.0) -> ScoreValue:
    """Energy score ES_beta(F, y) = E||X - y||^beta - 0.5 E||X - X'||^beta.

    In one dimension with beta = 1 this is exactly the kernel-form CRPS.

    Raises:
        BetaOutOfRange: beta outside (0, 2)
        DegenerateEnsemble: Fewer than two draws
    """
    value = energy_scores(forecast, np.atleast_1d(np.asarray(y, dtype=float))[None, :], beta)[0]
    return ScoreValue(f"ES({beta:g})", float(value))


# --- variogram score --------------------------------------------------------


def variogram_matrix(y: np.ndarray, p: float) -> np.ndarray:
    """Observed variogram of order p: the d x d matrix |y_i - y_j|^p."""
    if p <= 0:
        raise NonPositiveOrder(p)
    y = np.asarray(y, dtype=float)
    return np.abs(y[..., :, None] - y[..., None, :]) ** p


def expected_variogram(draws: np.ndarray, p: float) -> np.ndarray:
    """Ensemble mean of |X_i - X_j|^p, accumulated in blocks of draws."""
    n, d = draws.shape
    total = np.zeros((d, d))
    step = _rows_per_block(d * d)
    for start in range(0, n, step):
        total += variogram_matrix(draws[start:start + step], p).sum(axis=0)
    return total / n


def variogram_scores(forecast: EnsembleLike, observations: np.ndarray, p: float = 0.5) -> np.ndarray:
    """Variogram score of many observations against one ensemble, unit weights."""
    if p <= 0:
        raise NonPositiveOrder(p)
    draws = _as_draws(forecast)
    if draws.shape[0] < 1:
        raise DegenerateEnsemble(draws.shape[0], required=1)
    obs = _as_observations(observations, draws.shape[1])
    expected = expected_variogram(draws, p)
    scores = np.empty(obs.shape[0])
    step = _rows_per_block(draws.shape[1] ** 2)
    for start in range(0, obs.shape[0], step):
        diff = variogram_matrix(obs[start:start + step], p) - expected
        scores[start:start + step] = (diff**2).sum(axis=(1, 2))
    return scores


def variogram_score(forecast: EnsembleLike, y: np.ndarray, p: float = 0.5) -> ScoreValue:
    """Variogram score VS_p(F, y) = sum_ij (|y_i - y_j|^p - E|X_i - X_j|^p)^2.

    A common additive shift of every component of the forecast leaves the score
    unchanged.

    Raises:
        NonPositiveOrder: p <= 0
    """
    value = variogram_scores(forecast, np.atleast_1d(np.asarray(y, dtype=float))[None, :], p)[0]
    return ScoreValue(f"VS({p:g})", float(value))
