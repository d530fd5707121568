"""The four-stage simulation protocol.

For every panel and quarterly evaluation date t:

1. calibrate each roster model on the window ending the day before t;
2. for each model acting as DGP, draw ``n_draws`` realisations from its forecast;
3. score every model's ensemble against those realisations under every rule;
4. move on to the next date.

(panel, date) pairs are independent work units. Each unit runs in a worker
thread; all randomness comes from streams keyed by (panel, date, model, purpose),
so the tensor does not depend on the number of threads or completion order.
"""

import asyncio
import logging
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..errors import CalibrationError, ModelDocumentError
from ..forecasting import CalibratedModel, ModelSpec, fit_model, load_document, model_from_document, sample_model, save_model
from ..forecasting.mv_garch import UnivariateCache
from ..ingest import SeriesPanel
from ..scoring import ForecastEnsemble, ScoringRule, rule_from_tag
from ..utils.seeding import derive_rng
from .calendar import evaluation_dates
from .models import AbsentCell, GridSpec, ScoreCell, ScoreTensor

logger = logging.getLogger(__name__)


@dataclass
class CellResult:
    """Output of one (panel, date) work unit."""

    panel: str
    date: date
    cells: list[ScoreCell] = field(default_factory=list)
    absent: list[AbsentCell] = field(default_factory=list)


def scoring_inputs(model_ensemble: ForecastEnsemble, realisations: np.ndarray, rule: Union[ScoringRule, str]) -> np.ndarray:
    """Score one ensemble against each realisation; element i is S(F, y_i)."""
    if isinstance(rule, str):
        rule = rule_from_tag(rule)
    return rule.score(model_ensemble, realisations)


def _model_path(cache: Path, panel: str, model: str, when: date) -> Path:
    return cache / panel / model / f"{when.isoformat()}.json"


def _cached_model(path: Path, model: ModelSpec, lineage: tuple, end_date: date) -> Optional[CalibratedModel]:
    """The stored fit at ``path`` if it was made under the same roster entry, seeds and window."""
    try:
        document = load_document(path)
        if document.model_spec != model.model_dump(mode="json") or document.seed_lineage != list(lineage) or document.end_date != end_date:
            logger.warning(f"Cached model {path} was fitted under another configuration; refitting")
            return None
        return model_from_document(document)
    except ModelDocumentError as e:
        logger.warning(f"Ignoring unreadable cached model {path}: {e}")
        return None


def _calibrate(
    spec: GridSpec,
    model: ModelSpec,
    panel: SeriesPanel,
    when: date,
    univariate_cache: UnivariateCache,
) -> CalibratedModel:
    lineage = (spec.root_seed, panel.name, when.isoformat(), model.name, "bagging")
    end_date = panel.dates[panel.index_of(when) - 1]
    path = _model_path(spec.model_cache, panel.name, model.name, when) if spec.model_cache else None
    if path is not None and path.exists():
        cached = _cached_model(path, model, lineage, end_date)
        if cached is not None:
            return cached

    window = panel.window_before(when, model.window)
    fitted = fit_model(model, window, rng=derive_rng(*lineage), univariate_cache=univariate_cache)
    if path is not None:
        save_model(fitted, path, end_date=end_date, seed_lineage=lineage, model_spec=model.model_dump(mode="json"))
    return fitted


def run_cell(spec: GridSpec, panel: SeriesPanel, when: date) -> CellResult:
    """Run stages 1 to 3 for one panel and evaluation date."""
    result = CellResult(panel=panel.name, date=when)
    stamp = when.isoformat()

    # Stage 1: calibration; failures become absent cells
    fitted: dict[str, CalibratedModel] = {}
    univariate_cache: UnivariateCache = {}
    for model in spec.models:
        try:
            fitted[model.name] = _calibrate(spec, model, panel, when, univariate_cache)
        except CalibrationError as e:
            logger.error(f"Calibration of {model.name} on '{panel.name}' at {stamp} failed: {e}")
            result.absent.append(AbsentCell(panel=panel.name, date=when, model=model.name, reason=f"{type(e).__name__}: {e}"))

    names = tuple(fitted)
    ensembles = {
        name: sample_model(model, spec.n_draws, derive_rng(spec.root_seed, panel.name, stamp, name, "ensemble"))
        for name, model in fitted.items()
    }

    for dgp in names:
        # Stage 2: realisations from the designated DGP
        realisations = sample_model(fitted[dgp], spec.n_draws, derive_rng(spec.root_seed, panel.name, stamp, dgp, "realisations")).draws

        # Stage 3: every model against the same realisations
        scores = np.empty((len(spec.rules), len(names), spec.n_draws))
        for r, rule in enumerate(spec.rules):
            for m, name in enumerate(names):
                scores[r, m] = scoring_inputs(ensembles[name], realisations, rule)
        result.cells.append(ScoreCell(panel=panel.name, dgp=dgp, date=when, rules=spec.rule_tags, models=names, scores=scores))

    logger.info(f"Scored '{panel.name}' at {stamp}: {len(names)} models, {len(result.absent)} absent")
    return result


async def _run_units(spec: GridSpec, units: list[tuple[SeriesPanel, date]], threads: int) -> list[CellResult]:
    semaphore = asyncio.Semaphore(threads)

    async def run(panel: SeriesPanel, when: date) -> CellResult:
        async with semaphore:
            return await asyncio.to_thread(run_cell, spec, panel, when)

    return await asyncio.gather(*(run(panel, when) for panel, when in units))


def run_grid(spec: GridSpec, threads: int = 1, dates: Optional[dict[str, list[date]]] = None) -> ScoreTensor:
    """Execute the simulation grid.

    Args:
        spec: Panels, roster, rules and draw counts
        threads: Upper bound on concurrently running (panel, date) units
        dates: Evaluation dates per panel name; derived from the quarterly
            calendar when omitted

    Returns:
        The score tensor; calibration failures are listed in ``absent``

    Raises:
        InsufficientHistory: A panel is too short for the longest window
    """
    if dates is None:
        dates = {panel.name: evaluation_dates(panel, spec.min_history, spec.max_dates) for panel in spec.panels}

    units = [(panel, when) for panel in spec.panels for when in dates[panel.name]]
    logger.info(f"Running {len(units)} (panel, date) units on {threads} thread(s)")
    results = asyncio.run(_run_units(spec, units, max(1, threads)))

    tensor = ScoreTensor(
        rules=spec.rule_tags,
        models=tuple(m.name for m in spec.models),
        n_draws=spec.n_draws,
        subsample=spec.subsample,
        root_seed=spec.root_seed,
        dates={panel.name: tuple(dates[panel.name]) for panel in spec.panels},
    )
    for result in results:
        for cell in result.cells:
            tensor.insert(cell)
        tensor.absent.extend(result.absent)

    logger.info(f"Grid finished: {len(tensor)} cells, {len(tensor.absent)} absent (panel, date, model) entries")
    return tensor
