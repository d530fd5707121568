"""Univariate EGARCH(1,1) with standardized Student-t innovations.

ln s2_t = omega + alpha (|z_{t-1}| - E|z|) + gamma z_{t-1} + beta ln s2_{t-1},
with z_t = eps_t / s_t unit-variance Student-t(nu). The recursion starts at
the log of the sample variance.
"""

import logging
import math

import numpy as np
from numba import njit
from scipy.optimize import minimize

from ..errors import NonConvergence
from .copula import RngLike, as_rng
from .models import EgarchTParams, standardized_t_abs_mean

logger = logging.getLogger(__name__)

PENALTY = 1e10
FLAT_NU = 30.0
MIN_NU = 2.05
MAX_NU = 500.0
MAX_PERSISTENCE = 0.9999


@njit(cache=True)
def egarch_log_variance(omega: float, alpha: float, gamma: float, beta: float, nu: float, eps: np.ndarray, log_var0: float) -> np.ndarray:
    """Conditional log-variance path ln s2_t for t = 0..T-1."""
    T = eps.shape[0]
    expected_abs = standardized_t_abs_mean(nu)
    log_var = np.empty(T)
    log_var[0] = log_var0
    for t in range(1, T):
        z = eps[t - 1] * math.exp(-0.5 * log_var[t - 1])
        log_var[t] = omega + alpha * (abs(z) - expected_abs) + gamma * z + beta * log_var[t - 1]
    return log_var


@njit(cache=True)
def egarch_t_loglik(params: np.ndarray, eps: np.ndarray, log_var0: float) -> float:
    """Student-t log-likelihood of the residuals under the EGARCH recursion."""
    omega, alpha, gamma, beta, nu = params[0], params[1], params[2], params[3], params[4]
    log_var = egarch_log_variance(omega, alpha, gamma, beta, nu, eps, log_var0)
    const = math.lgamma((nu + 1.0) / 2.0) - math.lgamma(nu / 2.0) - 0.5 * math.log(math.pi * (nu - 2.0))
    ll = 0.0
    for t in range(eps.shape[0]):
        sigma2 = math.exp(log_var[t])
        ll += const - 0.5 * log_var[t] - 0.5 * (nu + 1.0) * math.log(1.0 + eps[t] * eps[t] / (sigma2 * (nu - 2.0)))
    return ll


@njit(cache=True)
def _simulate(omega: float, alpha: float, gamma: float, beta: float, nu: float, z: np.ndarray) -> np.ndarray:
    T = z.shape[0]
    expected_abs = standardized_t_abs_mean(nu)
    eps = np.empty(T)
    log_var = omega / (1.0 - beta)
    for t in range(T):
        eps[t] = math.exp(0.5 * log_var) * z[t]
        log_var = omega + alpha * (abs(z[t]) - expected_abs) + gamma * z[t] + beta * log_var
    return eps


def standardized_t(nu: float, size, rng: np.random.Generator) -> np.ndarray:
    """Student-t draws rescaled to unit variance."""
    return rng.standard_t(nu, size=size) * math.sqrt((nu - 2.0) / nu)


def simulate_egarch_t(params: EgarchTParams, T: int, rng: RngLike) -> np.ndarray:
    """Simulate T residuals from the recursion, starting at the unconditional log-variance."""
    z = standardized_t(params.nu, T, as_rng(rng))
    return params.mean + _simulate(params.omega, params.alpha, params.gamma, params.beta, params.nu, z)


def _objective(params: np.ndarray, eps: np.ndarray, log_var0: float) -> float:
    if abs(params[3]) >= MAX_PERSISTENCE or params[4] <= MIN_NU or params[4] > MAX_NU:
        return PENALTY
    value = -egarch_t_loglik(params, eps, log_var0)
    return value if np.isfinite(value) else PENALTY


def _starting_points(log_var: float) -> list[np.ndarray]:
    # (omega, alpha, gamma, beta, nu); omega chosen so the unconditional log-variance matches
    shapes = [(0.0, 0.0, 0.0, FLAT_NU), (0.1, -0.05, 0.95, 8.0), (0.15, 0.0, 0.90, 6.0), (0.05, -0.1, 0.98, 10.0), (0.2, -0.1, 0.80, 5.0)]
    return [np.array([log_var * (1.0 - beta), alpha, gamma, beta, nu]) for alpha, gamma, beta, nu in shapes]


def fit_egarch_t(series: np.ndarray, name: str = "") -> EgarchTParams:
    """Maximum-likelihood EGARCH(1,1)-t fit by multi-start Nelder-Mead.

    The series is demeaned first; the mean is kept in the returned parameters.

    Args:
        series: Univariate series of changes
        name: Label used in log messages

    Returns:
        The best parameters over five deterministic starting points

    Raises:
        NonConvergence: Constant series, or no start improved on the flat-volatility fit
    """
    series = np.asarray(series, dtype=float)
    mean = float(series.mean())
    eps = np.ascontiguousarray(series - mean)
    variance = float(eps.var())
    if not variance > 0 or not np.isfinite(variance):
        raise NonConvergence(f"Series {name!r} has zero variance")
    log_var0 = math.log(variance)

    starts = _starting_points(log_var0)
    flat_value = _objective(starts[0], eps, log_var0)
    best = None
    for i, start in enumerate(starts):
        result = minimize(
            _objective,
            start,
            args=(eps, log_var0),
            method="Nelder-Mead",
            options={"maxiter": 4000, "maxfev": 8000, "xatol": 1e-8, "fatol": 1e-8},
        )
        logger.debug(f"EGARCH {name} start {i}: -loglik={result.fun:.6f} ({result.message})")
        if best is None or result.fun < best.fun:
            best = result

    if best is None or not np.isfinite(best.fun) or best.fun >= PENALTY or best.fun > flat_value + 1e-8:
        raise NonConvergence(f"EGARCH fit for {name!r} did not improve on the flat-volatility likelihood")

    omega, alpha, gamma, beta, nu = (float(v) for v in best.x)
    log_var = egarch_log_variance(omega, alpha, gamma, beta, nu, eps, log_var0)
    return EgarchTParams(
        omega=omega,
        alpha=alpha,
        gamma=gamma,
        beta=beta,
        nu=nu,
        last_variance=float(math.exp(log_var[-1])),
        last_residual=float(eps[-1] * math.exp(-0.5 * log_var[-1])),
        mean=mean,
        log_likelihood=-float(best.fun),
    )


def standardized_residuals(series: np.ndarray, params: EgarchTParams) -> np.ndarray:
    """z_t = (x_t - mean) / s_t along the fitted recursion."""
    eps = np.ascontiguousarray(np.asarray(series, dtype=float) - params.mean)
    log_var = egarch_log_variance(params.omega, params.alpha, params.gamma, params.beta, params.nu, eps, math.log(eps.var()))
    return eps * np.exp(-0.5 * log_var)
