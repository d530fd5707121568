"""Factor-quantile (FQ) marginal models.

Each variable's quantiles are regressed on latent principal-component factors
of the window; the fitted quantiles at the factors' unconditional mean (0)
are joined into a monotone inverse CDF, and the variables are coupled by a
Gaussian copula. The AL variant regresses on the last m components, the AB
variant on the first m components with bootstrap aggregation over bags.
"""

import logging
from typing import Literal, Optional, Union

import numpy as np

from ..errors import InvalidModelSpec, RankDeficientWindow, SolverDivergence
from ..scoring import ForecastEnsemble
from .copula import RngLike, as_rng, check_window, fit_gaussian_copula, gaussian_copula_uniforms
from .models import DEFAULT_QUANTILES, CopulaKind, FqModel
from .quantile_curve import monotone_quantile_curve

logger = logging.getLogger(__name__)

Which = Literal["first", "last"]

MAX_ITERATIONS = 200
SMOOTHING_FLOOR = 1e-6
LOSS_TOLERANCE = 1e-10


def principal_components(window: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors of the window covariance.

    Each eigenvector is signed so that its largest-magnitude entry is positive.

    Raises:
        RankDeficientWindow: The centred window has rank < d
    """
    centred = window - window.mean(axis=0)
    d = window.shape[1]
    rank = int(np.linalg.matrix_rank(centred))
    if rank < d:
        raise RankDeficientWindow(rank, d)
    eigenvalues, eigenvectors = np.linalg.eigh(np.cov(centred, rowvar=False))
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]
    pivot = np.abs(eigenvectors).argmax(axis=0)
    signs = np.sign(eigenvectors[pivot, np.arange(d)])
    return eigenvalues, eigenvectors * signs


def pca_factors(window: np.ndarray, which: Which, m: int) -> np.ndarray:
    """Factor matrix (n x m) of the first-m or last-m principal components.

    Args:
        window: n x d calibration window
        which: ``first`` for the largest components, ``last`` for the smallest
        m: Number of factors, 1 <= m < d
    """
    window = np.asarray(window, dtype=float)
    d = window.shape[1]
    if not 1 <= m < d:
        raise InvalidModelSpec(f"Factor count m={m} must satisfy 1 <= m < d={d}")
    _, eigenvectors = principal_components(window)
    selected = eigenvectors[:, :m] if which == "first" else eigenvectors[:, d - m:]
    return (window - window.mean(axis=0)) @ selected


def pinball_loss(residuals: np.ndarray, taus: Union[float, np.ndarray]) -> np.ndarray:
    """Sum over the last axis of rho_tau(u) = u (tau - 1{u < 0})."""
    taus = np.asarray(taus, dtype=float)[..., None]
    return np.sum(residuals * (taus - (residuals < 0)), axis=-1)


def _fit_quantiles(X: np.ndarray, Y: np.ndarray, taus: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched IRLS quantile regression of every column of Y at every level in taus.

    Returns:
        (coefficients of shape (V, Q, k), boolean mask of diverged fits (V, Q))
    """
    n, k = X.shape
    targets = Y.T  # (V, n)

    ols = np.linalg.lstsq(X, Y, rcond=None)[0].T  # (V, k)
    residuals = targets - ols @ X.T
    beta = np.repeat(ols[:, None, :], taus.size, axis=1)
    # Start from OLS with the intercept shifted to the residual quantile
    beta[:, :, 0] += np.quantile(residuals, taus, axis=1).T
    residuals = targets[:, None, :] - np.einsum("vqk,nk->vqn", beta, X)
    start_loss = pinball_loss(residuals, taus)
    slack = 1e-9 * (start_loss + np.abs(targets).sum(axis=-1)[:, None])
    if np.all(start_loss <= slack):
        # Exact linear fit
        return beta, np.zeros(start_loss.shape, dtype=bool)
    best_beta, best_loss = beta.copy(), start_loss.copy()
    iterate_best = np.full(start_loss.shape, np.inf)

    eps = np.maximum(np.median(np.abs(residuals), axis=-1), SMOOTHING_FLOOR)
    previous = start_loss
    for _ in range(MAX_ITERATIONS):
        c = np.where(residuals >= 0, taus[:, None], 1.0 - taus[:, None])
        w = c / np.maximum(np.abs(residuals), eps[..., None])
        gram = np.einsum("vqn,nk,nl->vqkl", w, X, X)
        moment = np.einsum("vqn,nk,vn->vqk", w, X, targets)
        try:
            beta = np.linalg.solve(gram, moment[..., None])[..., 0]
        except np.linalg.LinAlgError as e:
            raise SolverDivergence(f"Weighted normal equations became singular: {e}") from e
        residuals = targets[:, None, :] - np.einsum("vqk,nk->vqn", beta, X)
        loss = pinball_loss(residuals, taus)

        improved = loss < best_loss
        best_beta[improved] = beta[improved]
        best_loss = np.where(improved, loss, best_loss)
        iterate_best = np.minimum(iterate_best, loss)

        at_floor = np.all(eps <= SMOOTHING_FLOOR)
        eps = np.maximum(0.5 * eps, SMOOTHING_FLOOR)
        if at_floor and np.all(np.abs(previous - loss) <= LOSS_TOLERANCE * (1.0 + loss)):
            break
        previous = loss

    diverged = ~np.isfinite(iterate_best) | (iterate_best > start_loss + slack)
    return best_beta, diverged


def quantile_regression(X: np.ndarray, y: np.ndarray, tau: float) -> np.ndarray:
    """Linear quantile regression minimising sum rho_tau(y - X b).

    Iteratively reweighted least squares with weights c_i / max(|u_i|, eps),
    where c_i is tau for non-negative residuals and 1 - tau otherwise, and eps
    decreases towards 1e-6.

    Args:
        X: n x k design matrix (include a column of ones for an intercept)
        y: Response of length n
        tau: Quantile level in (0, 1)

    Returns:
        Coefficient vector of length k

    Raises:
        SolverDivergence: No iterate reduced the pinball loss
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not 0 < tau < 1:
        raise InvalidModelSpec(f"Quantile level tau={tau} must lie in (0, 1)")
    if X.shape[0] <= X.shape[1]:
        raise InvalidModelSpec(f"Need more observations than coefficients, got {X.shape}")
    beta, diverged = _fit_quantiles(X, y[:, None], np.array([tau]))
    if diverged[0, 0]:
        raise SolverDivergence(f"Quantile regression at tau={tau} failed to decrease the pinball loss")
    return beta[0, 0]


def factor_quantile_coefficients(window: np.ndarray, which: Which, m: int, taus: np.ndarray) -> np.ndarray:
    """Quantile-regression coefficients of every variable on the selected factors.

    Returns:
        Array of shape (d, len(taus), m + 1), intercept first
    """
    factors = pca_factors(window, which, m)
    X = np.column_stack([np.ones(window.shape[0]), factors])
    beta, diverged = _fit_quantiles(X, window, taus)
    if diverged.any():
        v, q = np.argwhere(diverged)[0]
        raise SolverDivergence(f"Quantile regression for variable {v} at tau={taus[q]} failed to decrease the pinball loss")
    return beta


def fit_fq(
    window: np.ndarray,
    variant: Literal["AL", "AB"],
    m: Optional[int] = None,
    quantile_partition: Optional[tuple[float, ...]] = None,
    bags: int = 50,
    rng: RngLike = 0,
    copula: CopulaKind = CopulaKind.GAUSSIAN,
    resample: bool = True,
    name: str = "FQ",
) -> FqModel:
    """Fit a factor-quantile model.

    Args:
        window: n x d calibration window
        variant: ``AL`` (last-m components) or ``AB`` (first-m components, bagged)
        m: Factor count; defaults to 1 for AL and 2 for AB
        quantile_partition: Strictly increasing quantile levels
        bags: Bootstrap bags for AB
        rng: Seed or generator for the bootstrap
        copula: ``gaussian`` or ``independent``
        resample: Draw bootstrap rows; False uses the window itself in every bag
        name: Model name

    Returns:
        The calibrated FqModel
    """
    window = check_window(window)
    if variant not in ("AL", "AB"):
        raise InvalidModelSpec(f"Unknown FQ variant {variant!r}")
    m = m if m is not None else (1 if variant == "AL" else 2)
    taus = np.asarray(quantile_partition or DEFAULT_QUANTILES, dtype=float)
    if np.any(taus <= 0) or np.any(taus >= 1) or np.any(np.diff(taus) <= 0):
        raise InvalidModelSpec("Quantile partition must be strictly increasing within (0, 1)")
    n = window.shape[0]
    if n <= m + 1:
        raise InvalidModelSpec(f"Window of {n} rows is too short for {m} factors")

    if variant == "AL":
        coefficients = factor_quantile_coefficients(window, "last", m, taus)
        n_bags = 1
    else:
        if bags < 1:
            raise InvalidModelSpec(f"Bag count must be >= 1, got {bags}")
        generator = as_rng(rng)
        total = np.zeros((window.shape[1], taus.size, m + 1))
        for _ in range(bags):
            rows = generator.integers(0, n, size=n) if resample else np.arange(n)
            total += factor_quantile_coefficients(window[rows], "first", m, taus)
        coefficients = total / bags
        n_bags = bags

    # Factor value 0 is the factors' unconditional mean, so the fitted quantile is the intercept
    curves = tuple(monotone_quantile_curve(taus, coefficients[j, :, 0]) for j in range(window.shape[1]))
    logger.debug(f"Fitted {name} ({variant}, m={m}, bags={n_bags}) on a {n} x {window.shape[1]} window")
    return FqModel(
        variant=variant,
        m=m,
        taus=taus,
        coefficients=coefficients,
        curves=curves,
        correlation=fit_gaussian_copula(window, copula),
        bags=n_bags,
        name=name,
    )


def sample_fq(model: FqModel, n_draws: int, rng: RngLike) -> ForecastEnsemble:
    """Map Gaussian-copula uniforms through each variable's monotone inverse CDF."""
    u = gaussian_copula_uniforms(model.correlation, n_draws, rng)
    draws = np.column_stack([curve(u[:, j]) for j, curve in enumerate(model.curves)])
    return ForecastEnsemble(draws, model_id=model.name)
