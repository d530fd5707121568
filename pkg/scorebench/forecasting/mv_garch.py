"""CCC and DCC multivariate GARCH with EGARCH-t marginals.

Estimation is two-step: every column gets its own EGARCH-t fit, then the
correlation structure is estimated from the standardized residuals. DCC uses
correlation targeting (Q-bar is the sample covariance of the residuals) and a
Gaussian quasi-likelihood for (a, b):

    Q_t = (1 - a - b) Q-bar + a z_{t-1} z_{t-1}' + b Q_{t-1}
    C_t = diag(Q_t)^-1/2 Q_t diag(Q_t)^-1/2
"""

import logging
import math
from typing import Literal, Optional

import numpy as np
from numba import njit
from scipy import stats
from scipy.optimize import minimize

from ..errors import InsufficientWindow, InvalidModelSpec, NonConvergence
from ..scoring import ForecastEnsemble
from .copula import RngLike, as_rng, check_window, correlation_factor, cov_to_corr
from .egarch import fit_egarch_t, standardized_residuals, standardized_t
from .models import EgarchTParams, MvGarchModel

logger = logging.getLogger(__name__)

MIN_WINDOW = 2000
MAX_PERSISTENCE = 0.999
IDENTIFICATION_FLOOR = 1e-3
PENALTY = 1e10

UnivariateCache = dict[tuple[int, int], EgarchTParams]


@njit(cache=True)
def _dcc_q_path(a: float, b: float, qbar: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Q_0..Q_T, where Q_0 = Q-bar and Q_T is the one-step-ahead matrix."""
    T, d = z.shape
    q = np.empty((T + 1, d, d))
    q[0] = qbar
    for t in range(1, T + 1):
        q[t] = (1.0 - a - b) * qbar + a * np.outer(z[t - 1], z[t - 1]) + b * q[t - 1]
    return q


@njit(cache=True)
def dcc_loglik(a: float, b: float, qbar: np.ndarray, z: np.ndarray) -> float:
    """Gaussian correlation log-likelihood -0.5 sum(ln|C_t| + z' C_t^-1 z - z' z)."""
    T, d = z.shape
    q = qbar.copy()
    chol = np.zeros((d, d))
    x = np.empty(d)
    ll = 0.0
    for t in range(T):
        if t > 0:
            q = (1.0 - a - b) * qbar + a * np.outer(z[t - 1], z[t - 1]) + b * q
        scale = 1.0 / np.sqrt(np.diag(q))
        corr = q * np.outer(scale, scale)
        # Cholesky factor of C_t, NaN when it is not positive definite
        for i in range(d):
            for j in range(i + 1):
                s = corr[i, j]
                for k in range(j):
                    s -= chol[i, k] * chol[j, k]
                if i == j:
                    if s <= 0.0:
                        return np.nan
                    chol[i, i] = math.sqrt(s)
                else:
                    chol[i, j] = s / chol[j, j]
        log_det = 0.0
        quad = 0.0
        for i in range(d):
            s = z[t, i]
            for k in range(i):
                s -= chol[i, k] * x[k]
            x[i] = s / chol[i, i]
            log_det += 2.0 * math.log(chol[i, i])
            quad += x[i] * x[i] - z[t, i] * z[t, i]
        ll -= 0.5 * (log_det + quad)
    return ll


def dcc_correlations(a: float, b: float, qbar: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Correlation path C_0..C_T; the last entry is the one-step-ahead forecast."""
    q = _dcc_q_path(a, b, np.ascontiguousarray(qbar), np.ascontiguousarray(z))
    return np.stack([cov_to_corr(qt) for qt in q])


def _objective(params: np.ndarray, qbar: np.ndarray, z: np.ndarray) -> float:
    a, b = params
    if a < 0 or b < 0 or a + b > MAX_PERSISTENCE:
        return PENALTY
    value = -dcc_loglik(a, b, qbar, z)
    return value if np.isfinite(value) else PENALTY


def _fit_dcc_parameters(qbar: np.ndarray, z: np.ndarray) -> tuple[float, float]:
    null_value = _objective(np.zeros(2), qbar, z)
    best = None
    for start in ([0.01, 0.95], [0.05, 0.90], [0.02, 0.50]):
        result = minimize(_objective, np.array(start), args=(qbar, z), method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-8})
        logger.debug(f"DCC start {start}: -loglik={result.fun:.6f}")
        if best is None or result.fun < best.fun:
            best = result
    if best is None or not np.isfinite(best.fun) or best.fun >= PENALTY:
        raise NonConvergence("DCC likelihood could not be evaluated from any starting point")
    if best.fun > null_value:
        return 0.0, 0.0

    a, b = (float(v) for v in best.x)
    # Without dynamics b is unidentified; the likelihood-ratio test settles on the constant limit
    lr = 2.0 * (null_value - best.fun)
    if lr < stats.chi2.ppf(0.95, df=2):
        logger.debug(f"DCC dynamics not significant (LR={lr:.3f}); using a = b = 0")
        return 0.0, 0.0
    if a < IDENTIFICATION_FLOOR:
        logger.warning(f"DCC a={a:.2e} below {IDENTIFICATION_FLOOR}; b={b:.4f} is weakly identified")
    return a, b


def fit_univariate(window: np.ndarray, cache: Optional[UnivariateCache] = None) -> tuple[EgarchTParams, ...]:
    """EGARCH-t fits per column, reusing entries of ``cache`` keyed by (window length, column)."""
    fits = []
    n = window.shape[0]
    for j in range(window.shape[1]):
        key = (n, j)
        if cache is not None and key in cache:
            fits.append(cache[key])
            continue
        params = fit_egarch_t(window[:, j], name=f"column {j}")
        if cache is not None:
            cache[key] = params
        fits.append(params)
    return tuple(fits)


def fit_mv_garch(
    window: np.ndarray,
    kind: Literal["CCC", "DCC"],
    univariate_cache: Optional[UnivariateCache] = None,
    name: str = "GARCH",
) -> MvGarchModel:
    """Two-step CCC or DCC estimation.

    Args:
        window: n x d calibration window, n >= 2000
        kind: ``CCC`` or ``DCC``
        univariate_cache: Shared EGARCH fits, so CCC and DCC on the same window reuse them
        name: Model name

    Raises:
        InsufficientWindow: Fewer than 2000 rows
        NonConvergence: A univariate or DCC likelihood could not be optimised
        InvalidModelSpec: kind is neither CCC nor DCC
    """
    if kind not in ("CCC", "DCC"):
        raise InvalidModelSpec(f"Unknown multivariate GARCH kind {kind!r}")
    window = check_window(window)
    if window.shape[0] < MIN_WINDOW:
        raise InsufficientWindow(f"{kind}-GARCH needs at least {MIN_WINDOW} rows, got {window.shape[0]}")

    univariate = fit_univariate(window, univariate_cache)
    z = np.ascontiguousarray(np.column_stack([standardized_residuals(window[:, j], p) for j, p in enumerate(univariate)]))
    qbar = np.cov(z, rowvar=False)
    constant = cov_to_corr(qbar)

    if kind == "CCC":
        logger.debug(f"Fitted {name} (CCC) on a {window.shape[0]} x {window.shape[1]} window")
        return MvGarchModel(kind="CCC", univariate=univariate, correlation=constant, name=name)

    a, b = _fit_dcc_parameters(qbar, z)
    q_next = _dcc_q_path(a, b, qbar, z)[-1]
    logger.debug(f"Fitted {name} (DCC) a={a:.4f} b={b:.4f}")
    return MvGarchModel(kind="DCC", univariate=univariate, correlation=constant, dcc_a=a, dcc_b=b, qbar=qbar, q_next=q_next, name=name)


def next_correlation(model: MvGarchModel) -> np.ndarray:
    """C_{T+1}: constant for CCC, normalised Q_{T+1} for DCC."""
    if model.kind == "DCC" and model.q_next is not None:
        return cov_to_corr(model.q_next)
    return model.correlation


def sample_mv_garch(model: MvGarchModel, n_draws: int, rng: RngLike) -> ForecastEnsemble:
    """One-step-ahead draws mean + D_{T+1} L u.

    u holds independent standardized Student-t(nu_k) coordinates and L is the
    Cholesky factor of C_{T+1}.

    Raises:
        CholeskyFailure: C_{T+1} cannot be factorised even after clipping
    """
    generator = as_rng(rng)
    factor = correlation_factor(next_correlation(model))
    u = np.column_stack([standardized_t(p.nu, n_draws, generator) for p in model.univariate])
    scale = np.sqrt([p.next_variance() for p in model.univariate])
    location = np.array([p.mean for p in model.univariate])
    return ForecastEnsemble(location + (u @ factor.T) * scale, model_id=model.name)
