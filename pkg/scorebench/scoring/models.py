"""Data models for scoring rules.

This module contains the forecast-ensemble container, the score record, the
CRPS weight functions and the Gaussian parameters used by the density scores.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

from ..errors import DimensionMismatch, ScoringError, SingularCovariance


@dataclass(frozen=True, eq=False)
class ForecastEnsemble:
    """A predictive distribution represented by ``N_draws x d`` sample draws.

    A one-dimensional array is read as a univariate ensemble (``d = 1``).
    """

    draws: np.ndarray
    model_id: str = ""
    date: Optional[date] = None

    def __post_init__(self) -> None:
        draws = np.asarray(self.draws, dtype=float)
        if draws.ndim == 1:
            draws = draws[:, None]
        if draws.ndim != 2:
            raise DimensionMismatch(f"Ensemble draws must be an N x d matrix, got shape {draws.shape}")
        if not np.all(np.isfinite(draws)):
            raise ScoringError(f"Ensemble '{self.model_id}' contains non-finite draws")
        object.__setattr__(self, "draws", draws)

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0]

    @property
    def d(self) -> int:
        return self.draws.shape[1]


@dataclass(frozen=True)
class ScoreValue:
    """One evaluated score. Every rule is negatively oriented: lower is better."""

    rule: str
    value: float

    def __float__(self) -> float:
        return self.value


class Emphasis(str, Enum):
    """Which region of the distribution a weighted CRPS emphasises."""

    UNIFORM = "uniform"
    CENTRE = "centre"
    BOTH_TAILS = "both-tails"
    RIGHT_TAIL = "right-tail"
    LEFT_TAIL = "left-tail"


_QUANTILE_WEIGHTS: dict[Emphasis, Callable[[np.ndarray], np.ndarray]] = {
    Emphasis.UNIFORM: np.ones_like,
    Emphasis.CENTRE: lambda a: a * (1.0 - a),
    Emphasis.BOTH_TAILS: lambda a: (2.0 * a - 1.0) ** 2,
    Emphasis.RIGHT_TAIL: lambda a: a**2,
    Emphasis.LEFT_TAIL: lambda a: (1.0 - a) ** 2,
}


@dataclass(frozen=True)
class QuantileWeight:
    """Weight function nu(alpha) on (0, 1) for the quantile representation of the CRPS.

    Args:
        emphasis: One of the standard weight shapes
        function: Optional custom weight; overrides ``emphasis`` when given
    """

    emphasis: Emphasis = Emphasis.UNIFORM
    function: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    @property
    def tag(self) -> str:
        return "custom" if self.function is not None else Emphasis(self.emphasis).value

    def __call__(self, alpha: np.ndarray) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=float)
        weight = self.function or _QUANTILE_WEIGHTS[Emphasis(self.emphasis)]
        return np.broadcast_to(np.asarray(weight(alpha), dtype=float), alpha.shape)


@dataclass(frozen=True)
class ThresholdWeight:
    """Weight function u(z) on the real line for the threshold representation of the CRPS.

    The Gaussian density and distribution function used by the non-uniform
    shapes are located at ``loc`` with scale ``scale``.
    """

    emphasis: Emphasis = Emphasis.UNIFORM
    loc: float = 0.0
    scale: float = 1.0
    function: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    @property
    def tag(self) -> str:
        return "custom" if self.function is not None else Emphasis(self.emphasis).value

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.function is not None:
            return np.broadcast_to(np.asarray(self.function(z), dtype=float), z.shape)
        u = (z - self.loc) / self.scale
        match Emphasis(self.emphasis):
            case Emphasis.UNIFORM:
                return np.ones_like(z)
            case Emphasis.CENTRE:
                return stats.norm.pdf(u)
            case Emphasis.BOTH_TAILS:
                return 1.0 - stats.norm.pdf(u) / stats.norm.pdf(0.0)
            case Emphasis.RIGHT_TAIL:
                return stats.norm.cdf(u)
            case Emphasis.LEFT_TAIL:
                return stats.norm.sf(u)


@dataclass(frozen=True, eq=False)
class GaussianDensitySpec:
    """Mean vector and covariance matrix of a Gaussian predictive density."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        covariance = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        d = mean.shape[0]
        if covariance.shape != (d, d):
            raise DimensionMismatch(f"Covariance shape {covariance.shape} does not match mean of length {d}")
        if not np.allclose(covariance, covariance.T):
            raise SingularCovariance("Covariance matrix is not symmetric")
        try:
            chol = np.linalg.cholesky(covariance)
        except np.linalg.LinAlgError as e:
            raise SingularCovariance("Covariance matrix is not positive definite") from e
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", covariance)
        object.__setattr__(self, "_log_det", 2.0 * float(np.log(np.diag(chol)).sum()))

    @property
    def d(self) -> int:
        return self.mean.shape[0]

    @property
    def log_det(self) -> float:
        return self._log_det  # type: ignore[attr-defined]


class DensityScores(NamedTuple):
    """Log, quadratic and pseudospherical scores of one observation."""

    log: ScoreValue
    quadratic: ScoreValue
    pseudospherical: ScoreValue
