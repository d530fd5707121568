"""Monotone inverse-CDF handles built from fitted quantiles."""

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ..errors import InvalidModelSpec


def _monotone_slopes(taus: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson style knot slopes for a non-decreasing sequence.

    Interior slopes are the spacing-weighted mean of the neighbouring secants,
    zero when either secant is flat, and bounded by three times the smaller
    secant; end slopes are the one-sided secants. These conditions keep every
    cubic piece monotone.
    """
    h = np.diff(taus)
    secants = np.diff(q) / h
    slopes = np.empty_like(q)
    slopes[0] = secants[0]
    slopes[-1] = secants[-1]
    if q.size > 2:
        left, right = secants[:-1], secants[1:]
        h_left, h_right = h[:-1], h[1:]
        weighted = (h_left * right + h_right * left) / (h_left + h_right)
        bound = 3.0 * np.minimum(np.abs(left), np.abs(right))
        interior = np.clip(weighted, -bound, bound)
        interior[left * right <= 0] = 0.0
        slopes[1:-1] = interior
    return slopes


class MonotoneQuantileCurve:
    """Shape-preserving cubic interpolation of fitted quantiles.

    Fitted quantiles are first rearranged into non-decreasing order, which
    repairs quantile crossing. Outside the fitted levels the curve is flat.
    """

    def __init__(self, taus: np.ndarray, quantiles: np.ndarray):
        taus = np.asarray(taus, dtype=float)
        quantiles = np.asarray(quantiles, dtype=float)
        if taus.ndim != 1 or taus.shape != quantiles.shape or taus.size < 1:
            raise InvalidModelSpec(f"Need matching 1-D quantile levels and values, got {taus.shape} and {quantiles.shape}")
        if np.any(taus <= 0) or np.any(taus >= 1) or np.any(np.diff(taus) <= 0):
            raise InvalidModelSpec("Quantile levels must be strictly increasing within (0, 1)")
        self.taus = taus
        self.quantiles = np.sort(quantiles)
        self._spline = None
        if taus.size > 1:
            self._spline = CubicHermiteSpline(self.taus, self.quantiles, _monotone_slopes(self.taus, self.quantiles))

    def __call__(self, alpha: np.ndarray) -> np.ndarray:
        alpha = np.clip(np.asarray(alpha, dtype=float), self.taus[0], self.taus[-1])
        if self._spline is None:
            return np.full_like(alpha, self.quantiles[0])
        return self._spline(alpha)

    def to_dict(self) -> dict[str, list[float]]:
        return {"taus": self.taus.tolist(), "quantiles": self.quantiles.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, list[float]]) -> "MonotoneQuantileCurve":
        return cls(np.asarray(data["taus"]), np.asarray(data["quantiles"]))


def monotone_quantile_curve(taus: np.ndarray, q_fitted: np.ndarray) -> MonotoneQuantileCurve:
    """Build the monotone inverse-CDF handle for fitted quantiles ``q_fitted`` at levels ``taus``."""
    return MonotoneQuantileCurve(taus, q_fitted)
