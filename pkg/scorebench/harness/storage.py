"""On-disk layout of a score tensor.

    <directory>/manifest.json
    <directory>/scores/<panel>/<dgp>/<date>.csv    draw_index,rule,model,score

Rows are ordered by rule, then model, then draw index, and floats are written
with 17 significant digits, so identical tensors produce identical bytes.
"""

import logging
from datetime import date
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import HarnessError, MissingTensor
from .models import AbsentCell, ScoreCell, ScoreTensor

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
SCHEMA_VERSION = 1


class CellEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    panel: str
    dgp: str
    date: date
    models: list[str]


class TensorManifest(BaseModel):
    """Index of the partitions plus the run parameters that produced them."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    root_seed: int
    n_draws: int
    subsample: int
    rules: list[str]
    models: list[str]
    dates: dict[str, list[date]]
    spec: dict = Field(default_factory=dict, description="Echo of the run configuration")
    cells: list[CellEntry]
    absent: list[AbsentCell]
    cell_count: int


def partition_path(directory: Path, panel: str, dgp: str, when: date) -> Path:
    return directory / "scores" / panel / dgp / f"{when.isoformat()}.csv"


def _write_cell(cell: ScoreCell, path: Path) -> None:
    n_rules, n_models, n = cell.scores.shape
    frame = pd.DataFrame(
        {
            "draw_index": np.tile(np.arange(1, n + 1), n_rules * n_models),
            "rule": np.repeat(cell.rules, n_models * n),
            "model": np.tile(np.repeat(cell.models, n), n_rules),
            "score": cell.scores.reshape(-1),
        }
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def _read_cell(entry: CellEntry, rules: list[str], path: Path) -> ScoreCell:
    if not path.exists():
        raise MissingTensor(str(path))
    frame = pd.read_csv(path, dtype={"rule": str, "model": str}, float_precision="round_trip")
    n_rules, n_models = len(rules), len(entry.models)
    if len(frame) % max(n_rules * n_models, 1):
        raise HarnessError(f"Partition {path} has {len(frame)} rows, not a multiple of {n_rules} x {n_models}")
    n = len(frame) // (n_rules * n_models)
    expected_rules = np.repeat(rules, n_models * n)
    expected_models = np.tile(np.repeat(entry.models, n), n_rules)
    if not (np.array_equal(frame["rule"].to_numpy(), expected_rules) and np.array_equal(frame["model"].to_numpy(), expected_models)):
        raise HarnessError(f"Partition {path} is not in rule/model/draw order")
    return ScoreCell(
        panel=entry.panel,
        dgp=entry.dgp,
        date=entry.date,
        rules=tuple(rules),
        models=tuple(entry.models),
        scores=frame["score"].to_numpy(dtype=float).reshape(n_rules, n_models, n),
    )


def save_tensor(tensor: ScoreTensor, directory: Union[str, Path], spec_echo: Optional[dict] = None) -> Path:
    """Write every cell partition and the manifest; returns the manifest path."""
    directory = Path(directory)
    cells = tensor.sorted_cells()
    for cell in cells:
        _write_cell(cell, partition_path(directory, cell.panel, cell.dgp, cell.date))

    manifest = TensorManifest(
        root_seed=tensor.root_seed,
        n_draws=tensor.n_draws,
        subsample=tensor.subsample,
        rules=list(tensor.rules),
        models=list(tensor.models),
        dates={panel: list(dates) for panel, dates in sorted(tensor.dates.items())},
        spec=spec_echo or {},
        cells=[CellEntry(panel=c.panel, dgp=c.dgp, date=c.date, models=list(c.models)) for c in cells],
        absent=tensor.sorted_absent(),
        cell_count=len(cells),
    )
    path = directory / MANIFEST
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(cells)} score partitions and manifest to {directory}")
    return path


def load_manifest(directory: Union[str, Path]) -> TensorManifest:
    path = Path(directory) / MANIFEST
    if not path.exists():
        raise MissingTensor(str(Path(directory)))
    try:
        return TensorManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise HarnessError(f"Invalid tensor manifest {path}: {e}") from e


def load_tensor(directory: Union[str, Path]) -> ScoreTensor:
    """Read a tensor written by ``save_tensor``.

    Raises:
        MissingTensor: No manifest, or a listed partition is missing
        HarnessError: Manifest or partition is malformed
    """
    directory = Path(directory)
    manifest = load_manifest(directory)
    tensor = ScoreTensor(
        rules=tuple(manifest.rules),
        models=tuple(manifest.models),
        n_draws=manifest.n_draws,
        subsample=manifest.subsample,
        root_seed=manifest.root_seed,
        dates={panel: tuple(dates) for panel, dates in manifest.dates.items()},
        absent=list(manifest.absent),
    )
    for entry in manifest.cells:
        tensor.insert(_read_cell(entry, manifest.rules, partition_path(directory, entry.panel, entry.dgp, entry.date)))
    logger.info(f"Loaded {len(tensor)} score cells from {directory}")
    return tensor
