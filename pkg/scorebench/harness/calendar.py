"""Evaluation-date selection."""

import logging
from datetime import date
from typing import Optional

import numpy as np
import pandas as pd

from ..errors import InsufficientHistory
from ..ingest import SeriesPanel

logger = logging.getLogger(__name__)


def evaluation_dates(panel: SeriesPanel, min_history: int, max_dates: Optional[int] = None) -> list[date]:
    """First panel date of each calendar quarter with enough history behind it.

    Args:
        panel: The panel of changes the models are calibrated on
        min_history: Rows that must precede an evaluation date
        max_dates: Keep only the most recent ``max_dates`` dates

    Raises:
        InsufficientHistory: The panel has no more than ``min_history`` rows, or no
            quarter start has that much history
    """
    if panel.T <= min_history:
        raise InsufficientHistory(panel.T, min_history)

    quarters = pd.DatetimeIndex(panel.dates).to_period("Q")
    starts = np.flatnonzero(~quarters.duplicated())
    starts = starts[starts >= min_history]
    if starts.size == 0:
        raise InsufficientHistory(panel.T, min_history)
    if max_dates is not None:
        starts = starts[-max_dates:]

    dates = [panel.dates[i] for i in starts]
    logger.info(f"Panel '{panel.name}': {len(dates)} quarterly evaluation dates from {dates[0]} to {dates[-1]}")
    return dates
