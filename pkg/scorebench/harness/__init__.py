"""Simulation grid: calibrate, draw from a DGP, score every model, repeat per quarter."""

from .calendar import evaluation_dates
from .grid import CellResult, run_cell, run_grid, scoring_inputs
from .models import AbsentCell, CellKey, GridSpec, ScoreCell, ScoreTensor
from .storage import TensorManifest, load_manifest, load_tensor, partition_path, save_tensor

__all__ = [
    "AbsentCell",
    "CellKey",
    "CellResult",
    "GridSpec",
    "ScoreCell",
    "ScoreTensor",
    "TensorManifest",
    "evaluation_dates",
    "load_manifest",
    "load_tensor",
    "partition_path",
    "run_cell",
    "run_grid",
    "save_tensor",
    "scoring_inputs",
]
