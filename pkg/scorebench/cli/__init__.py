"""Configuration-driven command line: ingest, simulate and report."""

from .commands import build_panel, cmd_ingest, cmd_report, cmd_simulate, load_panel, render_summary_statistics, save_panel
from .config import CsvSource, GridConfig, ModelOverride, ModelsConfig, OutputConfig, RunConfig, SyntheticSource, load_run_config

__all__ = [
    "CsvSource",
    "GridConfig",
    "ModelOverride",
    "ModelsConfig",
    "OutputConfig",
    "RunConfig",
    "SyntheticSource",
    "build_panel",
    "cmd_ingest",
    "cmd_report",
    "cmd_simulate",
    "load_panel",
    "load_run_config",
    "render_summary_statistics",
    "save_panel",
]
