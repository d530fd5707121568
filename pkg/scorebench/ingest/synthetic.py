"""Synthetic panel generators.

Stand-ins for proprietary market data at desk scale. Every generator is a pure
function of (spec, T, d, seed): the same inputs always produce the same panel.
"""

import logging
from typing import Union

import numpy as np
import pandas as pd
from numba import njit

from ..errors import InvalidPanel
from .models import GaussianSpec, PanelKind, RegimeSpec, SeriesPanel, TCopulaGarchSpec

logger = logging.getLogger(__name__)

AnyGeneratorSpec = Union[GaussianSpec, TCopulaGarchSpec, RegimeSpec]

_OUTPUT_KIND = {
    "log-returns": PanelKind.LOG_RETURNS,
    "differences": PanelKind.DIFFERENCES,
    "levels": PanelKind.LEVELS,
}


def correlation_matrix(correlation: Union[float, list[list[float]]], d: int) -> np.ndarray:
    """Expand a scalar (equicorrelation) or explicit matrix into a d x d correlation matrix."""
    if isinstance(correlation, (int, float)):
        rho = float(correlation)
        if not -1.0 / (d - 1) <= rho < 1.0:
            raise InvalidPanel(f"Equicorrelation {rho} is not a valid correlation for d={d}")
        matrix = np.full((d, d), rho)
        np.fill_diagonal(matrix, 1.0)
        return matrix
    matrix = np.asarray(correlation, dtype=float)
    if matrix.shape != (d, d):
        raise InvalidPanel(f"Correlation matrix has shape {matrix.shape}, expected {(d, d)}")
    if not np.allclose(matrix, matrix.T) or not np.allclose(np.diag(matrix), 1.0):
        raise InvalidPanel("Correlation matrix must be symmetric with unit diagonal")
    return matrix


def _broadcast(value: Union[float, list[float]], d: int, what: str) -> np.ndarray:
    array = np.broadcast_to(np.asarray(value, dtype=float), (d,)) if np.ndim(value) == 0 else np.asarray(value, dtype=float)
    if array.shape != (d,):
        raise InvalidPanel(f"{what} has {array.size} entries, expected {d}")
    return np.array(array)


@njit(cache=True)
def simulate_garch_paths(omega: float, alpha: float, beta: float, innovations: np.ndarray) -> np.ndarray:
    """Vanilla GARCH(1,1) returns driven by unit-variance innovations.

    sigma2_{t+1} = omega + alpha * eps_t^2 + beta * sigma2_t, started at the
    unconditional variance omega / (1 - alpha - beta). Columns are independent
    recursions sharing the same parameters.
    """
    T, d = innovations.shape
    out = np.empty((T, d))
    unconditional = omega / (1.0 - alpha - beta)
    for j in range(d):
        sigma2 = unconditional
        for t in range(T):
            eps = np.sqrt(sigma2) * innovations[t, j]
            out[t, j] = eps
            sigma2 = omega + alpha * eps * eps + beta * sigma2
    return out


def _gaussian_changes(spec: GaussianSpec, T: int, d: int, rng: np.random.Generator) -> np.ndarray:
    mean = _broadcast(spec.mean, d, "mean")
    volatility = _broadcast(spec.volatility, d, "volatility")
    chol = np.linalg.cholesky(correlation_matrix(spec.correlation, d))
    z = rng.standard_normal((T, d)) @ chol.T
    return mean + volatility * z


def _t_copula_garch_changes(spec: TCopulaGarchSpec, T: int, d: int, rng: np.random.Generator) -> np.ndarray:
    chol = np.linalg.cholesky(correlation_matrix(spec.correlation, d))
    gaussian = rng.standard_normal((T, d)) @ chol.T
    mixing = rng.chisquare(spec.nu, size=(T, 1))
    # Shared chi-square mixing gives a multivariate t; rescale to unit variance
    innovations = gaussian * np.sqrt((spec.nu - 2.0) / mixing)
    return simulate_garch_paths(spec.omega, spec.alpha, spec.beta, np.ascontiguousarray(innovations))


def _regime_changes(spec: RegimeSpec, T: int, d: int, rng: np.random.Generator) -> np.ndarray:
    chols = [
        spec.calm_volatility * np.linalg.cholesky(correlation_matrix(spec.calm_correlation, d)),
        spec.turbulent_volatility * np.linalg.cholesky(correlation_matrix(spec.turbulent_correlation, d)),
    ]
    stay = (spec.stay_calm, spec.stay_turbulent)
    switches = rng.random(T)
    z = rng.standard_normal((T, d))
    out = np.empty((T, d))
    state = 0
    for t in range(T):
        out[t] = chols[state] @ z[t]
        if switches[t] > stay[state]:
            state = 1 - state
    return out


def generate_synthetic_panel(spec: AnyGeneratorSpec, T: int, d: int, seed: int, name: str = "synthetic") -> SeriesPanel:
    """Generate a dated synthetic panel.

    Args:
        spec: Generator specification (gaussian, t-copula-garch or regime)
        T: Number of rows
        d: Number of columns (at least 2)
        seed: Seed of the generator's random stream
        name: Panel name

    Returns:
        A SeriesPanel dated on consecutive business days from ``spec.start``
    """
    if T < 1:
        raise InvalidPanel(f"T must be >= 1, got {T}")
    if d < 2:
        raise InvalidPanel(f"Multivariate panels need d >= 2, got {d}")

    rng = np.random.default_rng(seed)
    if isinstance(spec, GaussianSpec):
        changes = _gaussian_changes(spec, T, d, rng)
    elif isinstance(spec, TCopulaGarchSpec):
        changes = _t_copula_garch_changes(spec, T, d, rng)
    elif isinstance(spec, RegimeSpec):
        changes = _regime_changes(spec, T, d, rng)
    else:
        raise InvalidPanel(f"Unknown generator spec {type(spec).__name__}")

    values = changes
    if spec.output != "log-returns":
        # Changes are log returns of a level path starting from start_level
        levels = spec.start_level * np.exp(np.cumsum(changes, axis=0))
        values = levels if spec.output == "levels" else np.diff(levels, axis=0, prepend=np.full((1, d), spec.start_level))
    dates = tuple(ts.date() for ts in pd.bdate_range(start=spec.start, periods=T))
    logger.debug(f"Generated {spec.family} panel '{name}' with T={T}, d={d}, seed={seed}")
    return SeriesPanel(
        dates=dates,
        values=values,
        labels=tuple(f"{name}_{j + 1}" for j in range(d)),
        kind=_OUTPUT_KIND[spec.output],
        name=name,
        metadata={"generator": spec.model_dump(mode="json"), "seed": seed},
    )
