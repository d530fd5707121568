"""Proper scoring rules for ensemble and Gaussian forecasts, negatively oriented."""

from .density import density_scores
from .ensemble import (
    crps_ensemble,
    crps_ensembles,
    energy_score,
    energy_scores,
    expected_variogram,
    mean_pairwise_distance,
    variogram_matrix,
    variogram_score,
    variogram_scores,
)
from .models import DensityScores, Emphasis, ForecastEnsemble, GaussianDensitySpec, QuantileWeight, ScoreValue, ThresholdWeight
from .rules import EnergyRule, RuleSpec, ScoringRule, VariogramRule, default_rules, rule_from_tag
from .weighted import (
    crps_quantile_weighted,
    crps_threshold_split,
    crps_threshold_weighted,
    empirical_cdf,
    empirical_quantile_function,
    spread_estimate,
)

__all__ = [
    "DensityScores",
    "Emphasis",
    "EnergyRule",
    "ForecastEnsemble",
    "GaussianDensitySpec",
    "QuantileWeight",
    "RuleSpec",
    "ScoreValue",
    "ScoringRule",
    "ThresholdWeight",
    "VariogramRule",
    "crps_ensemble",
    "crps_ensembles",
    "crps_quantile_weighted",
    "crps_threshold_split",
    "crps_threshold_weighted",
    "default_rules",
    "density_scores",
    "empirical_cdf",
    "empirical_quantile_function",
    "energy_score",
    "energy_scores",
    "expected_variogram",
    "mean_pairwise_distance",
    "rule_from_tag",
    "spread_estimate",
    "variogram_matrix",
    "variogram_score",
    "variogram_scores",
]
