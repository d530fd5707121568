"""Statistics that measure how well a scoring rule separates models from the DGP.

All scores are negatively oriented. Ratios are taken against the DGP's own
scores, paired by realisation.
"""

import logging
from collections.abc import Sequence
from typing import Union

import numpy as np
import pandas as pd
from scipy import stats

from ..errors import (
    AllPairsExcluded,
    ConstantSample,
    DegenerateDgpScore,
    EmptyInput,
    LengthMismatch,
    SubsampleExceedsN,
    TooFewPoints,
)
from .models import KdeSummary, RatioSummary

logger = logging.getLogger(__name__)

EPS_RATIO = 1e-12
KDE_POINTS = 512
SILVERMAN_FACTOR = 1.06

RngLike = Union[int, np.random.Generator]


def _paired(scores_m: np.ndarray, scores_dgp: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores_m = np.asarray(scores_m, dtype=float).ravel()
    scores_dgp = np.asarray(scores_dgp, dtype=float).ravel()
    if scores_m.size != scores_dgp.size:
        raise LengthMismatch(scores_m.size, scores_dgp.size)
    return scores_m, scores_dgp


def relative_scores(scores_m: np.ndarray, scores_dgp: np.ndarray, eps: float = EPS_RATIO) -> np.ndarray:
    """S_i(m) / S_i(m*) for the pairs whose DGP score clears the ratio guard."""
    scores_m, scores_dgp = _paired(scores_m, scores_dgp)
    keep = np.abs(scores_dgp) >= eps
    return scores_m[keep] / scores_dgp[keep]


def mean_relative_score(scores_m: np.ndarray, scores_dgp: np.ndarray, eps: float = EPS_RATIO) -> RatioSummary:
    """Average paired ratio of a model's scores to the DGP's scores.

    Raises:
        LengthMismatch: Vectors are not paired
        AllPairsExcluded: Every DGP score is below ``eps`` in absolute value
    """
    ratios = relative_scores(scores_m, scores_dgp, eps)
    n = np.size(scores_dgp)
    if ratios.size == 0:
        raise AllPairsExcluded(n)
    excluded = n - ratios.size
    if excluded:
        logger.warning(f"Excluded {excluded} of {n} pairs with |DGP score| < {eps:g}")
    return RatioSummary(float(ratios.mean()), excluded)


def score_differences(scores_m: np.ndarray, scores_dgp: np.ndarray) -> np.ndarray:
    """S_i(m) - S_i(m*) per realisation."""
    scores_m, scores_dgp = _paired(scores_m, scores_dgp)
    return scores_m - scores_dgp


def error_rate(diffs: np.ndarray) -> float:
    """Share of realisations on which the model beats the DGP; ties are not errors."""
    diffs = np.asarray(diffs, dtype=float).ravel()
    if diffs.size == 0:
        raise EmptyInput("Error rate of an empty difference vector")
    return float(np.count_nonzero(diffs < 0) / diffs.size)


def discrimination_heuristic(mean_scores: Sequence[float], dgp_index: int, eps: float = EPS_RATIO) -> float:
    """(1/M) sum_m mean(S(m)) / mean(S(m*)), including the DGP's own term.

    Raises:
        DegenerateDgpScore: The DGP's mean score is within ``eps`` of zero
    """
    means = np.asarray(mean_scores, dtype=float)
    if means.size == 0:
        raise EmptyInput("Discrimination heuristic of an empty roster")
    dgp = means[dgp_index]
    if abs(dgp) < eps:
        raise DegenerateDgpScore(float(dgp))
    return float(np.mean(means / dgp))


def pairwise_sensitivity(mean_m: float, mean_dgp: float, eps: float = EPS_RATIO) -> float:
    """Relative distance (mean(S(m)) - mean(S(m*))) / mean(S(m*))."""
    if abs(mean_dgp) < eps:
        raise DegenerateDgpScore(float(mean_dgp))
    return float((mean_m - mean_dgp) / mean_dgp)


def bootstrap_band(
    scores: np.ndarray,
    subsample: int = 100,
    reps: int = 5000,
    quantiles: tuple[float, float] = (0.25, 0.75),
    seed: RngLike = 0,
) -> tuple[float, float]:
    """Quantiles of the mean of ``subsample`` values drawn with replacement.

    Args:
        scores: Per-realisation values, typically relative scores
        subsample: Size of each resample
        reps: Number of resamples
        quantiles: Lower and upper quantile of the resampled means
        seed: Seed or generator of the resampling stream

    Raises:
        SubsampleExceedsN: ``subsample`` is larger than the number of scores
    """
    scores = np.asarray(scores, dtype=float).ravel()
    if subsample > scores.size:
        raise SubsampleExceedsN(subsample, scores.size)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    means = scores[rng.integers(0, scores.size, size=(reps, subsample))].mean(axis=1)
    lower, upper = np.quantile(means, quantiles)
    return float(lower), float(upper)


def kde_differences(
    diffs: np.ndarray,
    clip: tuple[float, float] = (0.001, 0.999),
    points: int = KDE_POINTS,
) -> KdeSummary:
    """Gaussian-kernel density of score differences between two quantiles.

    The bandwidth follows Silverman's rule 1.06 sigma n^(-1/5). The negative
    mass is the kernel probability on [clip low, min(0, clip high)].

    Raises:
        TooFewPoints: Fewer than 10 differences
        ConstantSample: All differences are equal
    """
    diffs = np.asarray(diffs, dtype=float).ravel()
    if diffs.size < 10:
        raise TooFewPoints(diffs.size)
    if np.ptp(diffs) == 0:
        raise ConstantSample(float(diffs[0]))

    kde = stats.gaussian_kde(diffs, bw_method=SILVERMAN_FACTOR * diffs.size ** -0.2)
    low, high = np.quantile(diffs, clip)
    if high <= low:
        low, high = diffs.min(), diffs.max()
    grid = np.linspace(low, high, points)
    negative = kde.integrate_box_1d(low, min(0.0, high)) if low < 0 else 0.0
    return KdeSummary(
        grid=grid,
        density=kde(grid),
        bandwidth=float(np.sqrt(kde.covariance[0, 0])),
        negative_mass=float(negative),
        mean=float(diffs.mean()),
    )


def moving_average(series: Sequence[float], window: int = 8) -> np.ndarray:
    """Trailing mean over the last ``window`` values (fewer at the start)."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    return pd.Series(np.asarray(series, dtype=float)).rolling(window, min_periods=1).mean().to_numpy()
