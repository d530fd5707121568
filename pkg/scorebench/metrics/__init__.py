"""Discrimination metrics over score tensors and the report built from them."""

from .discrimination import (
    EPS_RATIO,
    bootstrap_band,
    discrimination_heuristic,
    error_rate,
    kde_differences,
    mean_relative_score,
    moving_average,
    pairwise_sensitivity,
    relative_scores,
    score_differences,
)
from .models import KdeSummary, MetricReport, RatioSummary
from .report import build_report, write_report

__all__ = [
    "EPS_RATIO",
    "KdeSummary",
    "MetricReport",
    "RatioSummary",
    "bootstrap_band",
    "build_report",
    "discrimination_heuristic",
    "error_rate",
    "kde_differences",
    "mean_relative_score",
    "moving_average",
    "pairwise_sensitivity",
    "relative_scores",
    "score_differences",
    "write_report",
]
