"""Result types of the discrimination metrics."""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import pandas as pd

REPORT_COLUMNS = ["panel", "rule", "dgp", "model", "date", "metric", "value"]


class RatioSummary(NamedTuple):
    """Mean of S(m) / S(m*) and the number of pairs dropped by the ratio guard."""

    value: float
    excluded: int


@dataclass(frozen=True, eq=False)
class KdeSummary:
    """Gaussian-kernel density of score differences on the clipped range."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    negative_mass: float  # kernel mass below zero within the clipped range
    mean: float


@dataclass(eq=False)
class MetricReport:
    """Long-format metric rows, per-figure plot data and headline summary."""

    rows: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=REPORT_COLUMNS))
    figures: dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
