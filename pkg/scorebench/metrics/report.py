"""Turn a score tensor into metric tables, plot data and a headline summary.

Outputs written by ``write_report``:

    report.csv                   panel, rule, dgp, model, date, metric, value
    figures/relative_scores.csv  mean relative score with bootstrap quartile band
    figures/score_densities.csv  kernel densities of score differences (latest date)
    figures/error_rates.csv      error rates per DGP and over all DGPs
    figures/heuristic.csv        discrimination heuristic per date and its moving average
    figures/per_year.csv         calendar-year averages
    summary.json                 per-rule averages and rule orderings
"""

import json
import logging
import math
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from ..errors import MetricsError
from ..harness import ScoreCell, ScoreTensor
from ..utils.seeding import derive_rng
from .discrimination import (
    EPS_RATIO,
    bootstrap_band,
    discrimination_heuristic,
    error_rate,
    kde_differences,
    mean_relative_score,
    moving_average,
    pairwise_sensitivity,
    relative_scores,
    score_differences,
)
from .models import REPORT_COLUMNS, MetricReport

logger = logging.getLogger(__name__)

PROPRIETY_MARGIN = 0.02
MOVING_AVERAGE_WINDOW = 8
ALL = "*"


def _cell_rows(cell: ScoreCell, subsample: int, reps: int, seed: int, eps: float) -> tuple[list[tuple], list[dict]]:
    stamp = cell.date.isoformat()
    rows: list[tuple] = []
    bands: list[dict] = []
    dgp_index = cell.models.index(cell.dgp)

    def emit(rule: str, model: str, metric: str, value: float) -> None:
        rows.append((cell.panel, rule, cell.dgp, model, stamp, metric, float(value)))

    for r, rule in enumerate(cell.rules):
        block = cell.scores[r]
        means = block.mean(axis=1)
        dgp_scores = block[dgp_index]

        try:
            emit(rule, ALL, "discrimination_heuristic", discrimination_heuristic(means, dgp_index, eps))
        except MetricsError as e:
            logger.warning(f"No heuristic for {cell.key} {rule}: {e}")

        for m, model in enumerate(cell.models):
            emit(rule, model, "mean_score", means[m])
            if m == dgp_index:
                continue
            diffs = score_differences(block[m], dgp_scores)
            emit(rule, model, "error_rate", error_rate(diffs))
            emit(rule, model, "error_rate_sub", error_rate(diffs[:subsample]))
            emit(rule, model, "mean_difference", diffs.mean())
            try:
                relative = mean_relative_score(block[m], dgp_scores, eps)
                emit(rule, model, "mean_relative_score", relative.value)
                emit(rule, model, "excluded_pairs", relative.excluded)
                emit(rule, model, "mean_relative_score_sub", mean_relative_score(block[m][:subsample], dgp_scores[:subsample], eps).value)
                emit(rule, model, "pairwise_sensitivity", pairwise_sensitivity(means[m], means[dgp_index], eps))
            except MetricsError as e:
                logger.warning(f"No relative score for {model} in {cell.key} {rule}: {e}")
                continue
            try:
                rng = derive_rng(seed, cell.panel, rule, cell.dgp, stamp, model, "bootstrap")
                lower, upper = bootstrap_band(relative_scores(block[m], dgp_scores, eps), subsample, reps, seed=rng)
            except MetricsError as e:
                logger.debug(f"No bootstrap band for {model} in {cell.key} {rule}: {e}")
                continue
            emit(rule, model, "band_lower", lower)
            emit(rule, model, "band_upper", upper)
            bands.append(
                {
                    "panel": cell.panel,
                    "rule": rule,
                    "dgp": cell.dgp,
                    "model": model,
                    "date": stamp,
                    "mean_relative_score": relative.value,
                    "band_lower": lower,
                    "band_upper": upper,
                }
            )
    return rows, bands


def _densities(tensor: ScoreTensor) -> pd.DataFrame:
    """Kernel densities of score differences at each panel's latest scored date."""
    latest: dict[tuple[str, str], ScoreCell] = {}
    for cell in tensor.sorted_cells():
        latest[(cell.panel, cell.dgp)] = cell

    frames = []
    for cell in latest.values():
        dgp_index = cell.models.index(cell.dgp)
        for r, rule in enumerate(cell.rules):
            for m, model in enumerate(cell.models):
                if m == dgp_index:
                    continue
                try:
                    kde = kde_differences(score_differences(cell.scores[r, m], cell.scores[r, dgp_index]))
                except MetricsError as e:
                    logger.debug(f"No density for {model} in {cell.key} {rule}: {e}")
                    continue
                frames.append(
                    pd.DataFrame(
                        {
                            "panel": cell.panel,
                            "rule": rule,
                            "dgp": cell.dgp,
                            "model": model,
                            "date": cell.date.isoformat(),
                            "x": kde.grid,
                            "density": kde.density,
                            "negative_mass": kde.negative_mass,
                            "mean": kde.mean,
                        }
                    )
                )
    columns = ["panel", "rule", "dgp", "model", "date", "x", "density", "negative_mass", "mean"]
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=columns)


def _error_rates(errors: pd.DataFrame) -> pd.DataFrame:
    """Joint mean over (model, date) cells and the nested mean over dates of model means."""
    columns = ["panel", "rule", "dgp", "error_rate_joint", "error_rate_nested"]
    if errors.empty:
        return pd.DataFrame(columns=columns)
    per_dgp = errors.groupby(["panel", "rule", "dgp"])["value"].mean().rename("error_rate_joint").to_frame()
    per_dgp["error_rate_nested"] = errors.groupby(["panel", "rule", "dgp", "date"])["value"].mean().groupby(level=[0, 1, 2]).mean()
    overall = errors.groupby(["panel", "rule"])["value"].mean().rename("error_rate_joint").to_frame()
    overall["error_rate_nested"] = errors.groupby(["panel", "rule", "dgp", "date"])["value"].mean().groupby(level=[0, 1]).mean()
    overall = overall.assign(dgp=ALL).set_index("dgp", append=True)
    return pd.concat([per_dgp, overall]).sort_index().reset_index()[columns]


def _heuristic_path(heuristics: pd.DataFrame) -> pd.DataFrame:
    columns = ["panel", "rule", "date", "heuristic", "heuristic_ma"]
    if heuristics.empty:
        return pd.DataFrame(columns=columns)
    path = heuristics.groupby(["panel", "rule", "date"])["value"].mean().rename("heuristic").reset_index()
    path["heuristic_ma"] = path.groupby(["panel", "rule"])["heuristic"].transform(lambda s: moving_average(s.to_numpy(), MOVING_AVERAGE_WINDOW))
    return path[columns]


def _per_year(errors: pd.DataFrame, heuristics: pd.DataFrame) -> pd.DataFrame:
    columns = ["panel", "rule", "year", "error_rate", "heuristic"]
    parts = []
    for frame, name in ((errors, "error_rate"), (heuristics, "heuristic")):
        if not frame.empty:
            parts.append(frame.assign(year=frame["date"].str[:4]).groupby(["panel", "rule", "year"])["value"].mean().rename(name))
    if not parts:
        return pd.DataFrame(columns=columns)
    return pd.concat(parts, axis=1).reset_index().reindex(columns=columns)


def _finite(value: float) -> Optional[float]:
    return float(value) if value is not None and math.isfinite(value) else None


def _summary(tensor: ScoreTensor, rows: pd.DataFrame) -> dict:
    def by_rule(metric: str) -> pd.Series:
        return rows[rows["metric"] == metric].groupby("rule")["value"].mean()

    errors = rows[rows["metric"] == "error_rate"]
    relative = rows[rows["metric"] == "mean_relative_score"]
    nested = pd.Series(dtype=float)
    propriety = pd.Series(dtype=float)
    if not errors.empty:
        nested = errors.groupby(["rule", "panel", "dgp", "date"])["value"].mean().groupby(level=0).mean()
    if not relative.empty:
        # share of (panel, dgp, date) slices where every candidate stays within the margin of the DGP
        worst = relative.groupby(["rule", "panel", "dgp", "date"])["value"].min()
        propriety = (worst >= 1 - PROPRIETY_MARGIN).astype(float).groupby(level=0).mean()
    metrics = {
        "error_rate": by_rule("error_rate"),
        "error_rate_nested": nested,
        "error_rate_sub": by_rule("error_rate_sub"),
        "heuristic": by_rule("discrimination_heuristic"),
        "mean_relative_score": by_rule("mean_relative_score"),
        "propriety_share": propriety,
    }

    rules = {tag: {name: _finite(series.get(tag)) for name, series in metrics.items()} for tag in tensor.rules}

    def ordering(name: str) -> list[str]:
        ranked = [tag for tag in tensor.rules if rules[tag][name] is not None]
        return sorted(ranked, key=lambda tag: rules[tag][name])

    return {
        "cells": len(tensor),
        "absent_cells": len(tensor.absent),
        "absent": [a.model_dump(mode="json") for a in tensor.sorted_absent()],
        "excluded_pairs": int(rows.loc[rows["metric"] == "excluded_pairs", "value"].sum()),
        "rules": rules,
        "ordering": {"error_rate": ordering("error_rate"), "heuristic": ordering("heuristic")},
    }


def build_report(tensor: ScoreTensor, reps: int = 5000, seed: Optional[int] = None, eps: float = EPS_RATIO) -> MetricReport:
    """Compute every metric over the tensor.

    Args:
        tensor: Scores from ``run_grid`` or ``load_tensor``
        reps: Bootstrap repetitions per (cell, rule, model)
        seed: Root of the bootstrap streams; defaults to the tensor's root seed
        eps: Ratio guard for near-zero DGP scores

    Absent (panel, date, model) entries have no scores and contribute nothing.
    """
    seed = tensor.root_seed if seed is None else seed
    records: list[tuple] = []
    bands: list[dict] = []
    for cell in tensor.sorted_cells():
        cell_rows, cell_bands = _cell_rows(cell, tensor.subsample, reps, seed, eps)
        records.extend(cell_rows)
        bands.extend(cell_bands)
    logger.info(f"Computed {len(records)} metric values over {len(tensor)} cells")

    rows = pd.DataFrame(records, columns=REPORT_COLUMNS).astype({"value": float})
    errors = rows[rows["metric"] == "error_rate"]
    heuristics = rows[rows["metric"] == "discrimination_heuristic"]
    band_columns = ["panel", "rule", "dgp", "model", "date", "mean_relative_score", "band_lower", "band_upper"]
    figures = {
        "relative_scores": pd.DataFrame(bands, columns=band_columns),
        "score_densities": _densities(tensor),
        "error_rates": _error_rates(errors),
        "heuristic": _heuristic_path(heuristics),
        "per_year": _per_year(errors, heuristics),
    }
    return MetricReport(rows=rows, figures=figures, summary=_summary(tensor, rows))


def write_report(report: MetricReport, directory: Union[str, Path]) -> list[Path]:
    """Write report.csv, figures/*.csv and summary.json; returns the written paths."""
    directory = Path(directory)
    (directory / "figures").mkdir(parents=True, exist_ok=True)
    written = [directory / "report.csv"]
    report.rows.to_csv(written[0], index=False, float_format="%.17g", lineterminator="\n")
    for name, frame in sorted(report.figures.items()):
        path = directory / "figures" / f"{name}.csv"
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        written.append(path)
    summary = directory / "summary.json"
    summary.write_text(json.dumps(report.summary, indent=2) + "\n", encoding="utf-8")
    written.append(summary)
    logger.info(f"Wrote report with {len(report.rows)} rows to {directory}")
    return written
