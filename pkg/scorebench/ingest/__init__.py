"""Loading, validating and generating dated multivariate panels."""

from .loader import load_csv, reconstruct_levels, summary_statistics, to_changes, write_csv
from .models import (
    ChangeMode,
    CsvSchema,
    GaussianSpec,
    GeneratorSpec,
    PanelKind,
    RegimeSpec,
    SeriesPanel,
    SummaryStats,
    TCopulaGarchSpec,
)
from .synthetic import correlation_matrix, generate_synthetic_panel, simulate_garch_paths

__all__ = [
    "ChangeMode",
    "CsvSchema",
    "GaussianSpec",
    "GeneratorSpec",
    "PanelKind",
    "RegimeSpec",
    "SeriesPanel",
    "SummaryStats",
    "TCopulaGarchSpec",
    "correlation_matrix",
    "generate_synthetic_panel",
    "load_csv",
    "reconstruct_levels",
    "simulate_garch_paths",
    "summary_statistics",
    "to_changes",
    "write_csv",
]
