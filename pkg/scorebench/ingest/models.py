"""Data models for dated multivariate panels.

This module contains the panel container shared by every other package, the
summary-statistics record, and the Pydantic specs used to describe CSV
schemas and synthetic generators.
"""

from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Annotated, Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from ..errors import InvalidPanel, NonFiniteValue, NonMonotoneDates


class PanelKind(str, Enum):
    """What the values of a panel represent."""

    LEVELS = "levels"
    LOG_RETURNS = "log-returns"
    DIFFERENCES = "differences"


class ChangeMode(str, Enum):
    """How levels are turned into changes."""

    LOG_RETURN = "log-return"
    DIFFERENCE = "difference"

    @property
    def kind(self) -> PanelKind:
        return PanelKind.LOG_RETURNS if self is ChangeMode.LOG_RETURN else PanelKind.DIFFERENCES


@dataclass(frozen=True, eq=False)
class SeriesPanel:
    """A dated T x d observation matrix.

    Invariants are checked on construction: dates strictly increase, every
    value is finite and there are at least two columns.
    """

    dates: tuple[date, ...]
    values: np.ndarray
    labels: tuple[str, ...]
    kind: PanelKind = PanelKind.LEVELS
    name: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidPanel(f"Panel values must be a T x d matrix, got shape {values.shape}")
        if values.shape[0] != len(self.dates):
            raise InvalidPanel(f"{len(self.dates)} dates for {values.shape[0]} rows")
        if values.shape[1] != len(self.labels):
            raise InvalidPanel(f"{len(self.labels)} labels for {values.shape[1]} columns")
        if values.shape[1] < 2:
            raise InvalidPanel(f"Multivariate panels need d >= 2 columns, got {values.shape[1]}")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            row, col = bad[0]
            raise NonFiniteValue(row=int(row) + 1, column=self.labels[col], value=values[row, col])
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise NonMonotoneDates(row=i + 1, value=self.dates[i])
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def index_of(self, when: date) -> int:
        """Row index of an exact date."""
        return self.dates.index(when)

    def window_before(self, when: date, n: int) -> np.ndarray:
        """The ``n`` rows that end the day before ``when`` (exclusive)."""
        end = self.index_of(when)
        if end < n:
            raise InvalidPanel(f"Only {end} rows precede {when.isoformat()}, {n} requested")
        return self.values[end - n:end]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=list(self.labels))
        frame.insert(0, "date", [d.isoformat() for d in self.dates])
        return frame


@dataclass(frozen=True, eq=False)
class SummaryStats:
    """Per-column sample moments; kurtosis is the raw standardized fourth moment."""

    labels: tuple[str, ...]
    mean: np.ndarray
    volatility: np.ndarray
    skewness: np.ndarray
    kurtosis: np.ndarray

    def rows(self) -> list[dict[str, float | str]]:
        return [
            {
                "asset": label,
                "mean": float(self.mean[i]),
                "volatility": float(self.volatility[i]),
                "skewness": float(self.skewness[i]),
                "kurtosis": float(self.kurtosis[i]),
            }
            for i, label in enumerate(self.labels)
        ]


class CsvSchema(BaseModel):
    """Column layout of a panel CSV file."""

    model_config = ConfigDict(extra="forbid")

    date_column: str = "date"
    columns: Optional[list[str]] = None  # None means every non-date column


# --- synthetic generators -----------------------------------------------------


class _GeneratorBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    output: Literal["log-returns", "differences", "levels"] = "log-returns"
    start: date = date(2000, 1, 3)
    start_level: float = Field(default=100.0, gt=0)


class GaussianSpec(_GeneratorBase):
    """I.i.d. multivariate Gaussian changes."""

    family: Literal["gaussian"] = "gaussian"
    mean: float | list[float] = 0.0
    volatility: float | list[float] = Field(default=0.01)
    correlation: float | list[list[float]] = 0.0


class TCopulaGarchSpec(_GeneratorBase):
    """GARCH(1,1) margins driven by unit-variance multivariate Student-t innovations."""

    family: Literal["t-copula-garch"] = "t-copula-garch"
    omega: float = Field(default=2e-6, gt=0)
    alpha: float = Field(default=0.08, ge=0)
    beta: float = Field(default=0.90, ge=0)
    correlation: float | list[list[float]] = 0.3
    nu: float = Field(default=6.0, gt=2)

    @field_validator("beta")
    @classmethod
    def _stationary(cls, beta: float, info: ValidationInfo) -> float:
        alpha = info.data.get("alpha", 0.0)
        if alpha + beta >= 1:
            raise ValueError(f"alpha + beta = {alpha + beta} must be < 1 for a stationary GARCH")
        return beta


class RegimeSpec(_GeneratorBase):
    """Two-state Markov-switching Gaussian changes (calm / turbulent)."""

    family: Literal["regime"] = "regime"
    calm_volatility: float = Field(default=0.006, gt=0)
    turbulent_volatility: float = Field(default=0.02, gt=0)
    calm_correlation: float = 0.2
    turbulent_correlation: float = 0.7
    stay_calm: float = Field(default=0.99, gt=0, lt=1)
    stay_turbulent: float = Field(default=0.95, gt=0, lt=1)


GeneratorSpec = Annotated[Union[GaussianSpec, TCopulaGarchSpec, RegimeSpec], Field(discriminator="family")]
