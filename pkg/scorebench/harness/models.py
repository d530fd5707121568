"""Data models for the simulation grid and its score tensor."""

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import InvalidGridSpec
from ..forecasting import ModelSpec
from ..ingest import SeriesPanel
from ..scoring import ScoringRule

CellKey = tuple[str, str, date]  # (panel, dgp, date)


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Everything ``run_grid`` needs: panels, roster, rules and draw counts.

    Evaluation dates are derived per panel so that every model's window fits
    before the first date.
    """

    panels: tuple[SeriesPanel, ...]
    models: tuple[ModelSpec, ...]
    rules: tuple[ScoringRule, ...]
    n_draws: int = 5000
    subsample: int = 100
    root_seed: int = 0
    frequency: Literal["quarterly"] = "quarterly"
    max_dates: Optional[int] = None
    model_cache: Optional[Path] = None  # directory for calibrated-model documents

    def __post_init__(self) -> None:
        object.__setattr__(self, "panels", tuple(self.panels))
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.panels:
            raise InvalidGridSpec("Grid needs at least one panel")
        if not self.models:
            raise InvalidGridSpec("Grid needs at least one model")
        if not self.rules:
            raise InvalidGridSpec("Grid needs at least one scoring rule")
        for what, names in (
            ("panel", [p.name for p in self.panels]),
            ("model", [m.name for m in self.models]),
            ("rule", self.rule_tags),
        ):
            if len(set(names)) != len(names):
                raise InvalidGridSpec(f"Duplicate {what} names in {names}")
        if self.subsample < 1 or self.n_draws < self.subsample:
            raise InvalidGridSpec(f"Need 1 <= subsample <= n_draws, got subsample={self.subsample}, n_draws={self.n_draws}")
        if self.max_dates is not None and self.max_dates < 1:
            raise InvalidGridSpec(f"max_dates must be positive, got {self.max_dates}")

    @property
    def rule_tags(self) -> tuple[str, ...]:
        return tuple(rule.tag for rule in self.rules)

    @property
    def min_history(self) -> int:
        return max(m.window for m in self.models)


class AbsentCell(BaseModel):
    """A (panel, date, model) whose calibration failed; it has no scores."""

    model_config = ConfigDict(frozen=True)

    panel: str
    date: date
    model: str
    reason: str

    def sort_key(self) -> tuple[str, date, str]:
        return self.panel, self.date, self.model


@dataclass(frozen=True, eq=False)
class ScoreCell:
    """Scores of one (panel, DGP, date) slice.

    ``scores[r, m, i]`` is rule ``rules[r]`` applied to model ``models[m]``'s
    ensemble and the DGP's i-th realisation. Every model in the slice is scored
    against the same realisations.
    """

    panel: str
    dgp: str
    date: date
    rules: tuple[str, ...]
    models: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=float)
        if scores.shape[:2] != (len(self.rules), len(self.models)) or scores.ndim != 3:
            raise InvalidGridSpec(f"Score block of shape {scores.shape} does not match {len(self.rules)} rules x {len(self.models)} models")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    @property
    def key(self) -> CellKey:
        return self.panel, self.dgp, self.date

    @property
    def n_draws(self) -> int:
        return self.scores.shape[2]

    def of(self, rule: str, model: str) -> np.ndarray:
        """Score vector of ``model`` under ``rule``."""
        return self.scores[self.rules.index(rule), self.models.index(model)]


@dataclass(eq=False)
class ScoreTensor:
    """All score cells of a grid run plus the cells that could not be calibrated."""

    rules: tuple[str, ...]
    models: tuple[str, ...]
    n_draws: int
    subsample: int
    root_seed: int
    dates: dict[str, tuple[date, ...]] = field(default_factory=dict)
    cells: dict[CellKey, ScoreCell] = field(default_factory=dict)
    absent: list[AbsentCell] = field(default_factory=list)

    def insert(self, cell: ScoreCell) -> None:
        if cell.key in self.cells:
            raise InvalidGridSpec(f"Cell {cell.key} already present")
        self.cells[cell.key] = cell

    def sorted_cells(self) -> list[ScoreCell]:
        return [self.cells[key] for key in sorted(self.cells)]

    def sorted_absent(self) -> list[AbsentCell]:
        return sorted(set(self.absent), key=AbsentCell.sort_key)

    def __len__(self) -> int:
        return len(self.cells)
