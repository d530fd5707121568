"""Shared fixtures."""

from datetime import date

import numpy as np
import pandas as pd
import pytest

from scorebench.ingest import GaussianSpec, SeriesPanel, generate_synthetic_panel


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def level_csv(tmp_path):
    """A small, valid CSV of strictly positive levels."""
    path = tmp_path / "levels.csv"
    path.write_text(
        "date,gold,silver\n"
        "2020-01-02,100.0,20.0\n"
        "2020-01-03,101.0,19.5\n"
        "2020-01-06,99.5,19.8\n"
        "2020-01-07,102.0,20.4\n"
        "2020-01-08,103.5,20.1\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def small_panel() -> SeriesPanel:
    """Three years of daily Gaussian returns in two dimensions."""
    return generate_synthetic_panel(GaussianSpec(correlation=0.5), T=780, d=2, seed=7, name="small")


@pytest.fixture
def make_panel():
    """Build a business-day panel around a value matrix."""

    def _make(values: np.ndarray, start: date = date(2010, 1, 4), name: str = "panel") -> SeriesPanel:
        dates = tuple(ts.date() for ts in pd.bdate_range(start=start, periods=values.shape[0]))
        return SeriesPanel(dates=dates, values=values, labels=tuple(f"x{j}" for j in range(values.shape[1])), name=name)

    return _make
