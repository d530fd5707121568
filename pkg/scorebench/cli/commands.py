"""The three pipeline stages behind the CLI: ingest, simulate and report.

Everything is written under the configured output directory:

    panels/<name>.csv, panels/<name>.json   validated panels of changes
    config.schema.json                      JSON schema of the run configuration
    summary_statistics.md                   per-panel moments
    manifest.json, scores/...               the score tensor
    models/...                              cached calibrated models (optional)
    report.csv, figures/, summary.json      metrics
"""

import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

from jinja2 import Template
from pydantic import BaseModel, ConfigDict
from rich.console import Console
from rich.table import Table

from ..errors import MissingPanelCache
from ..harness import GridSpec, ScoreTensor, load_tensor, run_grid, save_tensor
from ..ingest import (
    ChangeMode,
    CsvSchema,
    PanelKind,
    SeriesPanel,
    SummaryStats,
    generate_synthetic_panel,
    load_csv,
    summary_statistics,
    to_changes,
    write_csv,
)
from ..metrics import MetricReport, build_report, write_report
from ..utils.logging import log_duration
from .config import CsvSource, DataSource, RunConfig, SyntheticSource

logger = logging.getLogger(__name__)

TEMPLATE_PATH = Path(__file__).parent / "templates" / "summary_statistics.md.j2"
PANELS = "panels"


class PanelRecord(BaseModel):
    """Sidecar of a cached panel: what its values are and where they came from."""

    model_config = ConfigDict(extra="forbid")

    name: str
    kind: PanelKind
    labels: list[str]
    T: int
    d: int
    metadata: dict[str, Any]


def _output_dir(config: RunConfig, output: Optional[Path]) -> Path:
    return Path(output) if output is not None else config.output.directory


def build_panel(source: DataSource) -> SeriesPanel:
    """Load or generate one panel and turn levels into changes."""
    if isinstance(source, CsvSource):
        panel = load_csv(source.path, CsvSchema(date_column=source.date_column, columns=source.columns), name=source.name)
        if source.transform != "none":
            panel = to_changes(panel, source.transform)
        return panel
    if isinstance(source, SyntheticSource):
        panel = generate_synthetic_panel(source.generator, source.T, source.d, source.seed, name=source.name)
        return to_changes(panel, ChangeMode.LOG_RETURN) if panel.kind is PanelKind.LEVELS else panel
    raise TypeError(f"Unknown data source {type(source).__name__}")


def save_panel(panel: SeriesPanel, directory: Path) -> Path:
    path = directory / f"{panel.name}.csv"
    write_csv(panel, path)
    record = PanelRecord(name=panel.name, kind=panel.kind, labels=list(panel.labels), T=panel.T, d=panel.d, metadata=panel.metadata)
    (directory / f"{panel.name}.json").write_text(record.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_panel(name: str, directory: Path) -> SeriesPanel:
    """Read a panel cached by ``cmd_ingest``.

    Raises:
        MissingPanelCache: The panel has not been ingested into ``directory``
    """
    csv_path, record_path = directory / f"{name}.csv", directory / f"{name}.json"
    if not csv_path.exists() or not record_path.exists():
        raise MissingPanelCache(name, str(csv_path))
    record = PanelRecord.model_validate_json(record_path.read_text(encoding="utf-8"))
    panel = load_csv(csv_path, name=name)
    return replace(panel, kind=record.kind, metadata=record.metadata)


def render_summary_statistics(panels: list[SeriesPanel], stats: list[SummaryStats]) -> str:
    template = Template(TEMPLATE_PATH.read_text(encoding="utf-8"))
    return template.render(
        panels=[
            {
                "name": panel.name,
                "kind": panel.kind.value,
                "T": panel.T,
                "first": panel.dates[0].isoformat(),
                "last": panel.dates[-1].isoformat(),
                "seed": panel.metadata.get("seed"),
                "rows": summary.rows(),
            }
            for panel, summary in zip(panels, stats)
        ]
    )


def summary_table(panel: SeriesPanel, stats: SummaryStats) -> Table:
    table = Table(title=f"{panel.name} ({panel.kind.value}, T={panel.T})")
    table.add_column("Asset", style="cyan")
    for column in ("Mean", "Volatility", "Skewness", "Kurtosis"):
        table.add_column(column, justify="right")
    for row in stats.rows():
        table.add_row(row["asset"], f"{row['mean']:.6f}", f"{row['volatility']:.6f}", f"{row['skewness']:.4f}", f"{row['kurtosis']:.4f}")
    return table


def cmd_ingest(config: RunConfig, output: Optional[Path] = None, console: Optional[Console] = None) -> list[SeriesPanel]:
    """Validate and cache every panel, then publish the schema and summary statistics.

    Raises:
        IngestError: A source cannot be read or transformed (the message names file and row)
    """
    console = console or Console()
    directory = _output_dir(config, output)
    (directory / PANELS).mkdir(parents=True, exist_ok=True)

    panels, stats = [], []
    for source in config.data:
        panel = build_panel(source)
        save_panel(panel, directory / PANELS)
        panels.append(panel)
        stats.append(summary_statistics(panel))
        logger.info(f"Ingested panel '{panel.name}' ({panel.kind.value}, T={panel.T}, d={panel.d})")

    (directory / "config.schema.json").write_text(json.dumps(RunConfig.model_json_schema(), indent=2) + "\n", encoding="utf-8")
    (directory / "summary_statistics.md").write_text(render_summary_statistics(panels, stats), encoding="utf-8")
    for panel, summary in zip(panels, stats):
        console.print(summary_table(panel, summary))
    return panels


def cmd_simulate(config: RunConfig, output: Optional[Path] = None, threads: int = 1) -> ScoreTensor:
    """Run the grid on the cached panels and write the tensor.

    Raises:
        MissingPanelCache: ``cmd_ingest`` has not been run for a panel
        InsufficientHistory: A panel is too short for the longest window
    """
    directory = _output_dir(config, output)
    panels = tuple(load_panel(source.name, directory / PANELS) for source in config.data)
    grid = config.grid
    spec = GridSpec(
        panels=panels,
        models=tuple(config.models.resolved()),
        rules=tuple(config.rules),
        n_draws=grid.n_draws,
        subsample=grid.subsample,
        root_seed=grid.root_seed,
        frequency=grid.frequency,
        max_dates=grid.max_dates,
        model_cache=directory / "models" if grid.cache_models else None,
    )
    with log_duration(logger, "Simulation grid"):
        tensor = run_grid(spec, threads=threads)
    save_tensor(tensor, directory, spec_echo=config.model_dump(mode="json", exclude={"output"}))
    return tensor


def rules_table(report: MetricReport) -> Table:
    table = Table(title="Scoring rules")
    table.add_column("Rule", style="cyan")
    for column in ("Error rate", "Heuristic", "Mean relative score", "Propriety share"):
        table.add_column(column, justify="right")

    def cell(value: Optional[float]) -> str:
        return "-" if value is None else f"{value:.4f}"

    for tag, values in report.summary.get("rules", {}).items():
        table.add_row(tag, cell(values["error_rate"]), cell(values["heuristic"]), cell(values["mean_relative_score"]), cell(values["propriety_share"]))
    return table


def cmd_report(config: RunConfig, output: Optional[Path] = None, console: Optional[Console] = None) -> tuple[ScoreTensor, MetricReport]:
    """Compute metrics from the stored tensor and write the report files.

    Raises:
        MissingTensor: ``cmd_simulate`` has not produced a tensor under the output directory
    """
    console = console or Console()
    directory = _output_dir(config, output)
    tensor = load_tensor(directory)
    with log_duration(logger, "Metrics"):
        report = build_report(tensor, reps=config.grid.bootstrap_reps, seed=config.grid.root_seed)
    write_report(report, directory)
    console.print(rules_table(report))
    ordering = report.summary.get("ordering", {})
    console.print(f"Error rate ordering: {' < '.join(ordering.get('error_rate', [])) or '-'}")
    console.print(f"Heuristic ordering: {' < '.join(ordering.get('heuristic', [])) or '-'}")
    return tensor, report
