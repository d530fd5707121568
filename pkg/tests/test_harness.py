import logging
from datetime import date

import numpy as np
import pandas as pd
import pytest

from scorebench.errors import InsufficientHistory, InvalidGridSpec, MissingTensor
from scorebench.forecasting import ModelFamily, ModelSpec, fit_model, load_document, sample_model
from scorebench.harness import (
    GridSpec,
    evaluation_dates,
    load_tensor,
    partition_path,
    run_grid,
    save_tensor,
    scoring_inputs,
)
from scorebench.scoring import ForecastEnsemble, default_rules, energy_score
from scorebench.utils.seeding import derive_rng

EDF = ModelSpec(name="EDF", family=ModelFamily.EDF, window=250)
POINT = ModelSpec(name="POINT", family=ModelFamily.POINT_MASS, window=250)


def _grid(panel, models=(EDF, POINT), **kwargs) -> GridSpec:
    kwargs.setdefault("n_draws", 100)
    kwargs.setdefault("subsample", 10)
    kwargs.setdefault("root_seed", 42)
    kwargs.setdefault("max_dates", 1)
    return GridSpec(panels=(panel,), models=models, rules=default_rules(), **kwargs)


class TestEvaluationDates:
    def test_three_years_of_quarters(self, make_panel):
        n = len(pd.bdate_range("2010-01-04", "2012-12-31"))
        panel = make_panel(np.random.default_rng(0).standard_normal((n, 2)))
        dates = evaluation_dates(panel, 0)
        assert len(dates) == 12
        assert dates[0] == date(2010, 1, 4)
        assert all(a < b for a, b in zip(dates, dates[1:]))
        assert len({(d.year, (d.month - 1) // 3) for d in dates}) == 12

    def test_history_requirement(self, make_panel):
        panel = make_panel(np.random.default_rng(0).standard_normal((300, 2)))
        for when in evaluation_dates(panel, 100):
            assert panel.index_of(when) >= 100
        with pytest.raises(InsufficientHistory):
            evaluation_dates(panel, 300)

    def test_most_recent_dates_are_kept(self, make_panel):
        panel = make_panel(np.random.default_rng(0).standard_normal((800, 2)))
        every = evaluation_dates(panel, 0)
        assert evaluation_dates(panel, 0, max_dates=3) == every[-3:]

    def test_long_panel(self, make_panel):
        panel = make_panel(np.zeros((5350, 2)) + np.arange(2))
        dates = evaluation_dates(panel, 8 * 261)
        assert 49 <= len(dates) <= 51


class TestGridSpec:
    def test_subsample_larger_than_draws(self, small_panel):
        with pytest.raises(InvalidGridSpec):
            _grid(small_panel, n_draws=50, subsample=100)

    def test_duplicate_models(self, small_panel):
        with pytest.raises(InvalidGridSpec):
            _grid(small_panel, models=(EDF, EDF))

    def test_min_history(self, small_panel):
        assert _grid(small_panel, models=(EDF, POINT.model_copy(update={"window": 400}))).min_history == 400


class TestScoringInputs:
    def test_point_mass_at_every_realisation(self):
        y = np.array([0.3, -1.2, 2.0])
        ensemble = ForecastEnsemble(np.tile(y, (20, 1)))
        realisations = np.tile(y, (50, 1))
        for tag in ("ES(1)", "VS(0.5)", "VS(2)"):
            np.testing.assert_array_equal(scoring_inputs(ensemble, realisations, tag), np.zeros(50))

    def test_single_realisation(self, rng):
        ensemble = ForecastEnsemble(rng.standard_normal((300, 3)))
        y = rng.standard_normal(3)
        scores = scoring_inputs(ensemble, y[None, :], "ES(1)")
        assert scores.shape == (1,)
        assert scores[0] == pytest.approx(energy_score(ensemble, y).value, abs=1e-12)

    def test_shifted_model_scores_worse(self):
        rng = np.random.default_rng(21)
        realisations = rng.standard_normal((10_000, 3))
        truth = ForecastEnsemble(rng.standard_normal((2000, 3)))
        shifted = ForecastEnsemble(rng.standard_normal((2000, 3)) + 0.5)
        diff = scoring_inputs(shifted, realisations, "ES(1)") - scoring_inputs(truth, realisations, "ES(1)")
        assert diff.mean() > 3 * diff.std(ddof=1) / np.sqrt(diff.size)


class TestRunGrid:
    def test_shape_contract(self, small_panel):
        tensor = run_grid(_grid(small_panel))
        assert len(tensor) == 2
        assert not tensor.absent
        for cell in tensor.sorted_cells():
            assert cell.scores.shape == (4, 2, 100)
            own = cell.scores[:, cell.models.index(cell.dgp)]
            assert np.isfinite(own).all()
            assert (own >= 0).all()

    def test_point_mass_dgp_scores_itself_zero(self, small_panel):
        tensor = run_grid(_grid(small_panel))
        (when,) = tensor.dates["small"]
        cell = tensor.cells[("small", "POINT", when)]
        np.testing.assert_array_equal(cell.scores[:, cell.models.index("POINT")], 0.0)

    def test_scores_match_direct_scoring(self, small_panel):
        spec = _grid(small_panel)
        tensor = run_grid(spec)
        (when,) = tensor.dates["small"]
        stamp = when.isoformat()
        window = small_panel.window_before(when, 250)
        model = fit_model(EDF, window, rng=derive_rng(42, "small", stamp, "EDF", "bagging"))
        ensemble = sample_model(model, 100, derive_rng(42, "small", stamp, "EDF", "ensemble"))
        realisations = sample_model(model, 100, derive_rng(42, "small", stamp, "EDF", "realisations")).draws
        cell = tensor.cells[("small", "EDF", when)]
        for tag in spec.rule_tags:
            np.testing.assert_allclose(cell.of(tag, "EDF"), scoring_inputs(ensemble, realisations, tag), rtol=0, atol=1e-12)

    def test_independent_of_threads_and_model_order(self, small_panel):
        single = run_grid(_grid(small_panel, max_dates=2), threads=1)
        threaded = run_grid(_grid(small_panel, models=(POINT, EDF), max_dates=2), threads=3)
        assert sorted(single.cells) == sorted(threaded.cells)
        for key, cell in single.cells.items():
            other = threaded.cells[key]
            for tag in cell.rules:
                for model in cell.models:
                    np.testing.assert_array_equal(cell.of(tag, model), other.of(tag, model))

    def test_failed_calibration_becomes_absent(self, small_panel):
        garch = ModelSpec(name="CCC", family=ModelFamily.CCC_GARCH, window=250)
        tensor = run_grid(_grid(small_panel, models=(EDF, garch), max_dates=2))
        assert len(tensor.absent) == 2
        assert {a.model for a in tensor.absent} == {"CCC"}
        assert all("InsufficientWindow" in a.reason for a in tensor.absent)
        for cell in tensor.sorted_cells():
            assert cell.models == ("EDF",)
            assert cell.dgp == "EDF"

    def test_model_cache(self, small_panel, tmp_path):
        spec = _grid(small_panel, model_cache=tmp_path / "models")
        first = run_grid(spec)
        (when,) = first.dates["small"]
        assert (tmp_path / "models" / "small" / "EDF" / f"{when.isoformat()}.json").exists()
        second = run_grid(spec)
        for key, cell in first.cells.items():
            np.testing.assert_array_equal(cell.scores, second.cells[key].scores)

    def test_model_cache_refits_changed_window(self, small_panel, tmp_path, caplog):
        cache = tmp_path / "models"
        run_grid(_grid(small_panel, model_cache=cache))
        short = ModelSpec(name="EDF", family=ModelFamily.EDF, window=60)
        with caplog.at_level(logging.WARNING, logger="scorebench"):
            cached = run_grid(_grid(small_panel, models=(short, POINT), model_cache=cache))
        fresh = run_grid(_grid(small_panel, models=(short, POINT)))
        assert "refitting" in caplog.text
        for key, cell in fresh.cells.items():
            np.testing.assert_array_equal(cell.scores, cached.cells[key].scores)
        (when,) = fresh.dates["small"]
        document = load_document(cache / "small" / "EDF" / f"{when.isoformat()}.json")
        assert document.model_spec["window"] == 60

    def test_model_cache_refits_changed_seed(self, small_panel, tmp_path):
        cache = tmp_path / "models"
        first = run_grid(_grid(small_panel, model_cache=cache))
        run_grid(_grid(small_panel, model_cache=cache, root_seed=43))
        (when,) = first.dates["small"]
        document = load_document(cache / "small" / "POINT" / f"{when.isoformat()}.json")
        assert document.seed_lineage[0] == 43


class TestStorage:
    def test_round_trip(self, small_panel, tmp_path):
        garch = ModelSpec(name="CCC", family=ModelFamily.CCC_GARCH, window=250)
        tensor = run_grid(_grid(small_panel, models=(EDF, POINT, garch)))
        save_tensor(tensor, tmp_path / "run")
        loaded = load_tensor(tmp_path / "run")
        assert loaded.rules == tensor.rules
        assert loaded.dates == tensor.dates
        assert loaded.sorted_absent() == tensor.sorted_absent()
        for key, cell in tensor.cells.items():
            np.testing.assert_array_equal(loaded.cells[key].scores, cell.scores)
            assert loaded.cells[key].models == cell.models

    def test_partition_layout(self, small_panel, tmp_path):
        tensor = run_grid(_grid(small_panel))
        save_tensor(tensor, tmp_path)
        (when,) = tensor.dates["small"]
        frame = pd.read_csv(partition_path(tmp_path, "small", "EDF", when))
        assert list(frame.columns) == ["draw_index", "rule", "model", "score"]
        assert len(frame) == 4 * 2 * 100
        assert frame["draw_index"].min() == 1 and frame["draw_index"].max() == 100

    def test_identical_bytes(self, small_panel, tmp_path):
        for name in ("a", "b"):
            save_tensor(run_grid(_grid(small_panel)), tmp_path / name)
        files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_missing_tensor(self, tmp_path):
        with pytest.raises(MissingTensor):
            load_tensor(tmp_path)
