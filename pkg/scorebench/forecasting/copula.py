"""Gaussian copula with empirical marginals."""

import logging
from typing import Union

import numpy as np
from scipy import stats

from ..errors import CholeskyFailure, DegenerateColumn, InsufficientWindow
from ..scoring import ForecastEnsemble
from .models import CopulaKind, EdfCopulaModel

logger = logging.getLogger(__name__)

RngLike = Union[int, np.random.Generator]

NEGATIVE_EIGENVALUE_TOLERANCE = 1e-10


def as_rng(rng: RngLike) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def check_window(window: np.ndarray, minimum: int = 0) -> np.ndarray:
    """Validate a calibration window: a finite n x d matrix of non-constant columns."""
    window = np.asarray(window, dtype=float)
    if window.ndim != 2:
        raise InsufficientWindow(f"Calibration window must be an n x d matrix, got shape {window.shape}")
    n, d = window.shape
    required = max(minimum, d + 2)
    if n < required:
        raise InsufficientWindow(f"Window has {n} rows, at least {required} required")
    for j in range(d):
        if np.ptp(window[:, j]) == 0:
            raise DegenerateColumn(j)
    return window


def cov_to_corr(matrix: np.ndarray) -> np.ndarray:
    """Normalise a covariance-like matrix to unit diagonal."""
    scale = 1.0 / np.sqrt(np.diag(matrix))
    corr = matrix * np.outer(scale, scale)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr


def clip_correlation(matrix: np.ndarray) -> np.ndarray:
    """Project a symmetric matrix onto unit-diagonal PSD matrices by eigenvalue clipping."""
    matrix = 0.5 * (matrix + matrix.T)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    if eigenvalues.min() >= -NEGATIVE_EIGENVALUE_TOLERANCE:
        return cov_to_corr(matrix)
    logger.warning(f"Clipping correlation matrix with minimum eigenvalue {eigenvalues.min():.3e}")
    clipped = (eigenvectors * np.maximum(eigenvalues, 0.0)) @ eigenvectors.T
    return cov_to_corr(clipped)


def correlation_factor(correlation: np.ndarray) -> np.ndarray:
    """A matrix L with L L^T equal to the correlation matrix.

    Cholesky is tried first; semi-definite matrices fall back to the
    symmetric square root of the clipped eigendecomposition.

    Raises:
        CholeskyFailure: The matrix has no real square root
    """
    try:
        return np.linalg.cholesky(correlation)
    except np.linalg.LinAlgError:
        logger.debug("Cholesky failed, falling back to eigen square root")
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(clip_correlation(correlation))
    except np.linalg.LinAlgError as e:
        raise CholeskyFailure(f"Cannot factorise correlation matrix: {e}") from e
    factor = eigenvectors * np.sqrt(np.maximum(eigenvalues, 0.0))
    if not np.all(np.isfinite(factor)):
        raise CholeskyFailure("Correlation square root is not finite")
    return factor


def normal_scores(window: np.ndarray) -> np.ndarray:
    """Column-wise normal scores Phi^-1((rank - 0.5) / n)."""
    n = window.shape[0]
    return stats.norm.ppf((stats.rankdata(window, axis=0) - 0.5) / n)


def fit_gaussian_copula(window: np.ndarray, kind: CopulaKind = CopulaKind.GAUSSIAN) -> np.ndarray:
    """Correlation matrix of the normal scores, clipped to PSD; identity for the independent copula."""
    d = window.shape[1]
    if kind is CopulaKind.INDEPENDENT:
        return np.eye(d)
    return clip_correlation(np.corrcoef(normal_scores(window), rowvar=False))


def gaussian_copula_uniforms(correlation: np.ndarray, n_draws: int, rng: RngLike) -> np.ndarray:
    """Uniforms on (0, 1)^d with Gaussian-copula dependence."""
    factor = correlation_factor(correlation)
    z = as_rng(rng).standard_normal((n_draws, correlation.shape[0])) @ factor.T
    return stats.norm.cdf(z)


def fit_edf_copula(window: np.ndarray, copula: CopulaKind = CopulaKind.GAUSSIAN, name: str = "EDF") -> EdfCopulaModel:
    """Empirical marginals plus Gaussian copula.

    Args:
        window: n x d calibration window
        copula: ``gaussian`` or ``independent``
        name: Model name

    Raises:
        DegenerateColumn: A window column is constant
    """
    window = check_window(window)
    correlation = fit_gaussian_copula(window, copula)
    logger.debug(f"Fitted {name} on a {window.shape[0]} x {window.shape[1]} window")
    return EdfCopulaModel(support=np.sort(window, axis=0), correlation=correlation, name=name)


def sample_edf_copula(model: EdfCopulaModel, n_draws: int, rng: RngLike) -> ForecastEnsemble:
    """Draw from the copula and map each coordinate through the EDF step inverse.

    Every marginal draw is an element of the historical support.
    """
    n = model.support.shape[0]
    u = gaussian_copula_uniforms(model.correlation, n_draws, rng)
    index = np.clip(np.ceil(n * u).astype(int), 1, n) - 1
    draws = np.take_along_axis(model.support, index, axis=0)
    return ForecastEnsemble(draws, model_id=model.name)
