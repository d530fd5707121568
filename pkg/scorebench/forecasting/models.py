"""Data models for forecasting models.

This module contains the model configuration (ModelSpec) and the calibrated
state of every model family. Calibrated models are immutable; fitting returns
a new instance and sampling never mutates it.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np
from numba import njit
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .quantile_curve import MonotoneQuantileCurve

DEFAULT_QUANTILES = tuple(round(0.05 * k, 2) for k in range(1, 20))


class ModelFamily(str, Enum):
    EDF = "edf"
    FQ_AL = "fq-al"
    FQ_AB = "fq-ab"
    CCC_GARCH = "ccc-garch"
    DCC_GARCH = "dcc-garch"
    POINT_MASS = "point-mass"


class CopulaKind(str, Enum):
    """Dependence model joining the marginals of the static models."""

    GAUSSIAN = "gaussian"
    INDEPENDENT = "independent"


class ModelSpec(BaseModel):
    """Configuration of one forecasting model in the roster."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(description="Unique model name used in score tables")
    family: ModelFamily
    window: int = Field(default=250, ge=3, description="Calibration window length n")
    factors: Optional[int] = Field(default=None, ge=1, description="Latent factor count m (FQ only)")
    quantiles: tuple[float, ...] = Field(default=DEFAULT_QUANTILES, description="Quantile partition (FQ only)")
    bags: int = Field(default=50, ge=1, description="Bootstrap bags (FQ-AB only)")
    copula: CopulaKind = CopulaKind.GAUSSIAN

    @field_validator("quantiles")
    @classmethod
    def _valid_partition(cls, quantiles: tuple[float, ...]) -> tuple[float, ...]:
        if not quantiles:
            raise ValueError("Quantile partition must not be empty")
        if any(not 0 < q < 1 for q in quantiles) or any(b <= a for a, b in zip(quantiles, quantiles[1:])):
            raise ValueError("Quantile partition must be strictly increasing within (0, 1)")
        return quantiles

    @property
    def n_factors(self) -> int:
        if self.factors is not None:
            return self.factors
        return 2 if self.family is ModelFamily.FQ_AB else 1


@dataclass(frozen=True, eq=False)
class EdfCopulaModel:
    """Empirical marginals joined by a Gaussian copula.

    ``support`` holds the sorted window values column by column (n x d).
    """

    support: np.ndarray
    correlation: np.ndarray
    name: str = "EDF"

    @property
    def d(self) -> int:
        return self.support.shape[1]


@dataclass(frozen=True, eq=False)
class FqModel:
    """Factor-quantile marginals joined by a Gaussian copula.

    ``coefficients`` has shape (d, len(taus), m + 1) with the intercept first;
    for the bagged variant it is the average over bags.
    """

    variant: str  # "AL" or "AB"
    m: int
    taus: np.ndarray
    coefficients: np.ndarray
    curves: tuple[MonotoneQuantileCurve, ...]
    correlation: np.ndarray
    bags: int = 1
    name: str = "FQ"

    @property
    def d(self) -> int:
        return len(self.curves)


@njit(cache=True)
def standardized_t_abs_mean(nu: float) -> float:
    """E|z| for a Student-t variable with nu degrees of freedom rescaled to unit variance."""
    return math.sqrt(nu - 2.0) * math.exp(math.lgamma((nu - 1.0) / 2.0) - math.lgamma(nu / 2.0)) / math.sqrt(math.pi)


@dataclass(frozen=True)
class EgarchTParams:
    """EGARCH(1,1) with standardized Student-t innovations.

    ln s2_t = omega + alpha (|z_{t-1}| - E|z|) + gamma z_{t-1} + beta ln s2_{t-1}
    """

    omega: float
    alpha: float
    gamma: float
    beta: float
    nu: float
    last_variance: float
    last_residual: float
    mean: float = 0.0
    log_likelihood: float = float("nan")

    def next_variance(self) -> float:
        """One-step-ahead conditional variance."""
        log_var = (
            self.omega
            + self.alpha * (abs(self.last_residual) - standardized_t_abs_mean(self.nu))
            + self.gamma * self.last_residual
            + self.beta * math.log(self.last_variance)
        )
        return math.exp(log_var)

    def unconditional_variance(self) -> float:
        return math.exp(self.omega / (1.0 - self.beta))


@dataclass(frozen=True, eq=False)
class MvGarchModel:
    """CCC or DCC multivariate GARCH with EGARCH-t marginals.

    For CCC ``correlation`` is the constant C. For DCC it is Q-bar normalised
    to unit diagonal, and ``q_next`` holds the one-step-ahead Q_{T+1}.
    """

    kind: str  # "CCC" or "DCC"
    univariate: tuple[EgarchTParams, ...]
    correlation: np.ndarray
    dcc_a: float = 0.0
    dcc_b: float = 0.0
    qbar: Optional[np.ndarray] = None
    q_next: Optional[np.ndarray] = None
    name: str = "GARCH"
    metadata: dict = field(
        default_factory=lambda: {
            "volatility": "egarch-t(1,1)",
            "innovations": "independent standardized t per coordinate, correlated through the Cholesky factor",
        }
    )

    @property
    def d(self) -> int:
        return len(self.univariate)


@dataclass(frozen=True, eq=False)
class PointMassModel:
    """Every draw equals the window mean."""

    location: np.ndarray
    name: str = "POINT"

    @property
    def d(self) -> int:
        return self.location.shape[0]


CalibratedModel = Union[EdfCopulaModel, FqModel, MvGarchModel, PointMassModel]
