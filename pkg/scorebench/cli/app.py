"""Command-line entry point: ``scorebench ingest|simulate|report --config <file>``."""

import logging
from enum import IntEnum
from pathlib import Path
from typing import Callable, Optional

import typer
from rich.console import Console

from ..config import settings
from ..errors import ConfigError, HarnessError, IngestError, InsufficientHistory, InvalidGridSpec, ScoreBenchError
from ..utils.logging import setup_logging
from .commands import cmd_ingest, cmd_report, cmd_simulate
from .config import RunConfig, load_run_config

logger = logging.getLogger(__name__)

app = typer.Typer(help="Benchmark multivariate scoring rules on simulated forecasts", no_args_is_help=True)
console = Console()


class ExitCode(IntEnum):
    SUCCESS = 0
    PARTIAL = 1
    CONFIG_ERROR = 2
    IO_ERROR = 3
    TOTAL_FAILURE = 4


def exit_code_for(error: Exception) -> ExitCode:
    """Map an error to the documented exit code."""
    if isinstance(error, (ConfigError, InvalidGridSpec, InsufficientHistory)):
        return ExitCode.CONFIG_ERROR
    if isinstance(error, (IngestError, HarnessError, OSError)):
        return ExitCode.IO_ERROR
    return ExitCode.TOTAL_FAILURE


def _run(config_path: Path, verbose: bool, action: Callable[[RunConfig], ExitCode]) -> None:
    setup_logging("DEBUG" if verbose or settings.DEBUG else settings.LOG_LEVEL, settings.LOG_FILE)
    try:
        code = action(load_run_config(config_path))
    except (ScoreBenchError, OSError) as e:
        logger.error(str(e))
        raise typer.Exit(code=int(exit_code_for(e))) from e
    raise typer.Exit(code=int(code))


ConfigOption = typer.Option(..., "--config", "-c", help="Run configuration (JSON)", dir_okay=False)
OutputOption = typer.Option(None, "--output", "-o", help="Output directory (overrides output.directory)")
VerboseOption = typer.Option(False, "--verbose", "-v", help="Enable debug logging")


@app.command()
def ingest(config: Path = ConfigOption, output: Optional[Path] = OutputOption, verbose: bool = VerboseOption) -> None:
    """Validate data sources, cache the panels and print summary statistics."""

    def action(run: RunConfig) -> ExitCode:
        cmd_ingest(run, output, console)
        return ExitCode.SUCCESS

    _run(config, verbose, action)


@app.command()
def simulate(
    config: Path = ConfigOption,
    output: Optional[Path] = OutputOption,
    threads: int = typer.Option(settings.THREADS, "--threads", "-t", min=1, envvar="SCOREBENCH_THREADS", help="Concurrent (panel, date) units"),
    verbose: bool = VerboseOption,
) -> None:
    """Run the simulation grid and write the score tensor."""

    def action(run: RunConfig) -> ExitCode:
        tensor = cmd_simulate(run, output, threads)
        if len(tensor) == 0:
            logger.error("Every cell is absent; no scores were produced")
            return ExitCode.TOTAL_FAILURE
        if tensor.absent:
            logger.warning(f"{len(tensor.absent)} (panel, date, model) calibrations failed; see manifest.json")
            return ExitCode.PARTIAL
        return ExitCode.SUCCESS

    _run(config, verbose, action)


@app.command()
def report(config: Path = ConfigOption, output: Optional[Path] = OutputOption, verbose: bool = VerboseOption) -> None:
    """Compute discrimination metrics from the stored tensor."""

    def action(run: RunConfig) -> ExitCode:
        tensor, _ = cmd_report(run, output, console)
        return ExitCode.PARTIAL if tensor.absent else ExitCode.SUCCESS

    _run(config, verbose, action)
