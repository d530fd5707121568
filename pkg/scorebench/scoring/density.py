"""Closed-form density scores for Gaussian predictive distributions."""

import numpy as np
from scipy.stats import multivariate_normal

from ..errors import DimensionMismatch, ScoringError
from .models import DensityScores, GaussianDensitySpec, ScoreValue


def log_integral_power(spec: GaussianDensitySpec, alpha: float) -> float:
    """log of the integral of f^alpha for a Gaussian density f."""
    d = spec.d
    return -0.5 * d * (alpha - 1.0) * np.log(2.0 * np.pi) - 0.5 * (alpha - 1.0) * spec.log_det - 0.5 * d * np.log(alpha)


def density_scores(spec: GaussianDensitySpec, y: np.ndarray, alpha: float = 2.0) -> DensityScores:
    """Log, quadratic and pseudospherical scores of ``y`` under a Gaussian forecast.

    The pseudospherical score is returned negated so that, like the other
    two, lower is better.

    Args:
        spec: Gaussian mean and covariance
        y: Observation of dimension d
        alpha: Pseudospherical order, > 1

    Returns:
        DensityScores(log, quadratic, pseudospherical)
    """
    if alpha <= 1.0:
        raise ScoringError(f"Pseudospherical order alpha={alpha} must be > 1")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (spec.d,):
        raise DimensionMismatch(f"Observation has shape {y.shape}, density has dimension {spec.d}")

    log_f = float(multivariate_normal(mean=spec.mean, cov=spec.covariance).logpdf(y))
    squared_norm = float(np.exp(log_integral_power(spec, 2.0)))
    log_alpha_norm = log_integral_power(spec, alpha) / alpha
    pseudo = -float(np.exp((alpha - 1.0) * (log_f - log_alpha_norm)))

    return DensityScores(
        log=ScoreValue("LogS", -log_f),
        quadratic=ScoreValue("QS", squared_norm - 2.0 * np.exp(log_f)),
        pseudospherical=ScoreValue(f"PseudoS({alpha:g})", pseudo),
    )
