"""Loading, writing and transforming dated panels.

CSV layout: a header row, one ISO-8601 ``date`` column and numeric value
columns, comma separated, UTF-8. Rows with missing values are rejected rather
than dropped; cleaning is expected to happen upstream.
"""

import logging
from datetime import date
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from scipy import stats

from ..errors import (
    DegenerateColumn,
    InsufficientRows,
    InvalidPanel,
    MissingColumn,
    NonFiniteValue,
    NonMonotoneDates,
    NonPositiveLevel,
    UnparseableDate,
)
from .models import ChangeMode, CsvSchema, PanelKind, SeriesPanel, SummaryStats

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _parse_dates(raw: pd.Series) -> list[date]:
    dates: list[date] = []
    for row, value in enumerate(raw, start=1):
        try:
            parsed = date.fromisoformat(str(value).strip())
        except ValueError as e:
            raise UnparseableDate(row=row, value=value) from e
        if dates and parsed <= dates[-1]:
            raise NonMonotoneDates(row=row, value=parsed)
        dates.append(parsed)
    return dates


def load_csv(path: PathLike, schema: Optional[CsvSchema] = None, name: str = "") -> SeriesPanel:
    """Load and validate a panel of levels from a CSV file.

    Args:
        path: Path to the CSV file
        schema: Column layout (defaults to a ``date`` column plus every other column)
        name: Optional panel name; defaults to the file stem

    Returns:
        A validated SeriesPanel with kind=levels

    Raises:
        MissingColumn: The date column or a requested value column is absent
        UnparseableDate: A date cell is not ISO-8601
        NonFiniteValue: A value is missing, non-numeric, NaN or infinite
        NonMonotoneDates: Dates repeat or go backwards
    """
    schema = schema or CsvSchema()
    path = Path(path)
    logger.info(f"Loading panel from {path}")

    # Everything is read as text so that each bad cell can be reported with its row
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    frame.columns = [c.strip() for c in frame.columns]

    if schema.date_column not in frame.columns:
        raise MissingColumn(schema.date_column, str(path))
    columns = schema.columns or [c for c in frame.columns if c != schema.date_column]
    for column in columns:
        if column not in frame.columns:
            raise MissingColumn(column, str(path))

    dates = _parse_dates(frame[schema.date_column])

    values = np.empty((len(frame), len(columns)))
    for j, column in enumerate(columns):
        numeric = pd.to_numeric(frame[column].str.strip(), errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(numeric))
        if bad.size:
            row = int(bad[0])
            raise NonFiniteValue(row=row + 1, column=column, value=frame[column].iloc[row])
        values[:, j] = numeric

    panel = SeriesPanel(
        dates=tuple(dates),
        values=values,
        labels=tuple(columns),
        kind=PanelKind.LEVELS,
        name=name or path.stem,
        metadata={"source": str(path)},
    )
    logger.info(f"Loaded panel '{panel.name}' with T={panel.T}, d={panel.d}")
    return panel


def write_csv(panel: SeriesPanel, path: PathLike) -> None:
    """Write a panel in the layout ``load_csv`` reads.

    Values are written with ``repr`` precision so that reading them back
    reproduces the same floats.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = panel.to_frame()
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.debug(f"Wrote panel '{panel.name}' to {path}")


def to_changes(panel: SeriesPanel, mode: Union[ChangeMode, str] = ChangeMode.LOG_RETURN) -> SeriesPanel:
    """Turn a panel of levels into log returns or first differences.

    Args:
        panel: Panel of levels
        mode: ``log-return`` for ln(x_t / x_{t-1}), ``difference`` for x_t - x_{t-1}

    Returns:
        A panel with T-1 rows dated at the later date of each pair
    """
    mode = ChangeMode(mode)
    if panel.kind is not PanelKind.LEVELS:
        raise InvalidPanel(f"Panel '{panel.name}' already holds {panel.kind.value}, not levels")
    if panel.T < 2:
        raise InsufficientRows(f"Need at least 2 rows to compute changes, got {panel.T}")

    levels = panel.values
    if mode is ChangeMode.LOG_RETURN:
        bad = np.argwhere(levels <= 0)
        if bad.size:
            row, col = bad[0]
            raise NonPositiveLevel(row=int(row) + 1, column=panel.labels[col], value=float(levels[row, col]))
        changes = np.diff(np.log(levels), axis=0)
    else:
        changes = np.diff(levels, axis=0)

    return SeriesPanel(
        dates=panel.dates[1:],
        values=changes,
        labels=panel.labels,
        kind=mode.kind,
        name=panel.name,
        metadata={**panel.metadata, "first_levels": panel.values[0].tolist(), "first_date": panel.dates[0].isoformat()},
    )


def reconstruct_levels(changes: SeriesPanel, first_levels: np.ndarray, first_date: date) -> SeriesPanel:
    """Cumulate a panel of changes back into levels.

    Args:
        changes: Panel of log returns or differences
        first_levels: Levels observed on ``first_date``
        first_date: The date preceding the first change

    Returns:
        A panel of levels with T+1 rows
    """
    first_levels = np.asarray(first_levels, dtype=float)
    if changes.kind is PanelKind.LOG_RETURNS:
        path = first_levels * np.exp(np.cumsum(changes.values, axis=0))
    elif changes.kind is PanelKind.DIFFERENCES:
        path = first_levels + np.cumsum(changes.values, axis=0)
    else:
        raise InvalidPanel(f"Panel '{changes.name}' holds levels, nothing to reconstruct")
    return SeriesPanel(
        dates=(first_date, *changes.dates),
        values=np.vstack([first_levels, path]),
        labels=changes.labels,
        kind=PanelKind.LEVELS,
        name=changes.name,
    )


def summary_statistics(panel: SeriesPanel) -> SummaryStats:
    """Sample mean, volatility, skewness and raw kurtosis per column.

    Raises:
        InsufficientRows: Fewer than 4 rows
        DegenerateColumn: A column is constant
    """
    if panel.T < 4:
        raise InsufficientRows(f"Summary statistics need at least 4 rows, got {panel.T}")
    values = panel.values
    volatility = values.std(axis=0, ddof=1)
    for j, label in enumerate(panel.labels):
        if np.ptp(values[:, j]) == 0:
            raise DegenerateColumn(label)
    return SummaryStats(
        labels=panel.labels,
        mean=values.mean(axis=0),
        volatility=volatility,
        skewness=stats.skew(values, axis=0, bias=True),
        kurtosis=stats.kurtosis(values, axis=0, fisher=False, bias=True),
    )
