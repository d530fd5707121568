"""Model roster and dispatch over model families."""

import logging
from typing import Optional

import numpy as np

from ..errors import InvalidModelSpec
from ..scoring import ForecastEnsemble
from .copula import RngLike, check_window, fit_edf_copula, sample_edf_copula
from .factor_quantile import fit_fq, sample_fq
from .models import CalibratedModel, EdfCopulaModel, FqModel, ModelFamily, ModelSpec, MvGarchModel, PointMassModel
from .mv_garch import UnivariateCache, fit_mv_garch, sample_mv_garch

logger = logging.getLogger(__name__)


def default_roster() -> list[ModelSpec]:
    """The eight benchmark models: EDF, FQ-AL and FQ-AB on 250 and 2000 rows, CCC and DCC on 2000."""
    roster = []
    for window in (250, 2000):
        roster.append(ModelSpec(name=f"EDF_{window}", family=ModelFamily.EDF, window=window))
        roster.append(ModelSpec(name=f"FQ-AL_{window}", family=ModelFamily.FQ_AL, window=window))
        roster.append(ModelSpec(name=f"FQ-AB_{window}", family=ModelFamily.FQ_AB, window=window))
    roster.append(ModelSpec(name="CCC-GARCH", family=ModelFamily.CCC_GARCH, window=2000))
    roster.append(ModelSpec(name="DCC-GARCH", family=ModelFamily.DCC_GARCH, window=2000))
    return roster


def fit_point_mass(window: np.ndarray, name: str = "POINT") -> PointMassModel:
    window = np.asarray(window, dtype=float)
    return PointMassModel(location=window.mean(axis=0), name=name)


def fit_model(
    spec: ModelSpec,
    window: np.ndarray,
    rng: RngLike = 0,
    univariate_cache: Optional[UnivariateCache] = None,
) -> CalibratedModel:
    """Calibrate the model described by ``spec`` on ``window``.

    Args:
        spec: Model configuration
        window: The spec.window rows preceding the evaluation date
        rng: Seed or generator for stochastic fitting (bagging)
        univariate_cache: EGARCH fits shared between CCC and DCC on the same date

    Raises:
        CalibrationError: Any model-specific calibration failure
    """
    window = np.asarray(window, dtype=float)
    if window.shape[0] != spec.window:
        raise InvalidModelSpec(f"{spec.name} expects a window of {spec.window} rows, got {window.shape[0]}")

    match spec.family:
        case ModelFamily.EDF:
            return fit_edf_copula(window, copula=spec.copula, name=spec.name)
        case ModelFamily.FQ_AL | ModelFamily.FQ_AB:
            variant = "AL" if spec.family is ModelFamily.FQ_AL else "AB"
            return fit_fq(
                window,
                variant,
                m=spec.n_factors,
                quantile_partition=spec.quantiles,
                bags=spec.bags,
                rng=rng,
                copula=spec.copula,
                name=spec.name,
            )
        case ModelFamily.CCC_GARCH:
            return fit_mv_garch(window, "CCC", univariate_cache=univariate_cache, name=spec.name)
        case ModelFamily.DCC_GARCH:
            return fit_mv_garch(window, "DCC", univariate_cache=univariate_cache, name=spec.name)
        case ModelFamily.POINT_MASS:
            return fit_point_mass(check_window(window), name=spec.name)
    raise InvalidModelSpec(f"Unknown model family {spec.family!r}")


def sample_model(model: CalibratedModel, n_draws: int, rng: RngLike) -> ForecastEnsemble:
    """Draw a one-step-ahead forecast ensemble from a calibrated model."""
    if isinstance(model, EdfCopulaModel):
        return sample_edf_copula(model, n_draws, rng)
    if isinstance(model, FqModel):
        return sample_fq(model, n_draws, rng)
    if isinstance(model, MvGarchModel):
        return sample_mv_garch(model, n_draws, rng)
    if isinstance(model, PointMassModel):
        return ForecastEnsemble(np.tile(model.location, (n_draws, 1)), model_id=model.name)
    raise TypeError(f"Cannot sample from {type(model).__name__}")
