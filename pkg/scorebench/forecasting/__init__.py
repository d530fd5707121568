"""Forecasting models calibrated on rolling windows and sampled into ensembles."""

from .copula import (
    clip_correlation,
    correlation_factor,
    cov_to_corr,
    fit_edf_copula,
    fit_gaussian_copula,
    gaussian_copula_uniforms,
    normal_scores,
    sample_edf_copula,
)
from .egarch import fit_egarch_t, simulate_egarch_t, standardized_residuals
from .factor_quantile import fit_fq, pca_factors, pinball_loss, principal_components, quantile_regression, sample_fq
from .models import (
    DEFAULT_QUANTILES,
    CalibratedModel,
    CopulaKind,
    EdfCopulaModel,
    EgarchTParams,
    FqModel,
    ModelFamily,
    ModelSpec,
    MvGarchModel,
    PointMassModel,
    standardized_t_abs_mean,
)
from .mv_garch import dcc_correlations, dcc_loglik, fit_mv_garch, next_correlation, sample_mv_garch
from .quantile_curve import MonotoneQuantileCurve, monotone_quantile_curve
from .roster import default_roster, fit_model, fit_point_mass, sample_model
from .serialization import ModelDocument, load_document, load_model, model_from_document, model_to_document, save_model

__all__ = [
    "DEFAULT_QUANTILES",
    "CalibratedModel",
    "CopulaKind",
    "EdfCopulaModel",
    "EgarchTParams",
    "FqModel",
    "ModelDocument",
    "ModelFamily",
    "ModelSpec",
    "MonotoneQuantileCurve",
    "MvGarchModel",
    "PointMassModel",
    "clip_correlation",
    "correlation_factor",
    "cov_to_corr",
    "dcc_correlations",
    "default_roster",
    "dcc_loglik",
    "fit_edf_copula",
    "fit_egarch_t",
    "fit_fq",
    "fit_gaussian_copula",
    "fit_model",
    "fit_mv_garch",
    "fit_point_mass",
    "gaussian_copula_uniforms",
    "load_document",
    "load_model",
    "model_from_document",
    "model_to_document",
    "monotone_quantile_curve",
    "next_correlation",
    "normal_scores",
    "pca_factors",
    "pinball_loss",
    "principal_components",
    "quantile_regression",
    "sample_edf_copula",
    "sample_fq",
    "sample_model",
    "sample_mv_garch",
    "save_model",
    "simulate_egarch_t",
    "standardized_residuals",
    "standardized_t_abs_mean",
]
