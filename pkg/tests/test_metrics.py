import json
from datetime import date

import numpy as np
import pandas as pd
import pytest
from scipy import integrate

from scorebench.errors import (
    AllPairsExcluded,
    ConstantSample,
    DegenerateDgpScore,
    EmptyInput,
    LengthMismatch,
    SubsampleExceedsN,
    TooFewPoints,
)
from scorebench.harness import AbsentCell, ScoreCell, ScoreTensor
from scorebench.metrics import (
    bootstrap_band,
    build_report,
    discrimination_heuristic,
    error_rate,
    kde_differences,
    mean_relative_score,
    moving_average,
    pairwise_sensitivity,
    relative_scores,
    score_differences,
    write_report,
)
from scorebench.scoring import ForecastEnsemble, energy_scores

WHEN = date(2020, 1, 2)


@pytest.fixture
def two_model_tensor() -> ScoreTensor:
    """Model B always scores twice as badly as model A."""
    a = np.arange(1.0, 21.0)
    scores = np.stack([a, 2 * a])[None, :, :]
    tensor = ScoreTensor(rules=("ES(1)",), models=("A", "B"), n_draws=20, subsample=10, root_seed=0, dates={"p": (WHEN,)})
    for dgp in ("A", "B"):
        tensor.insert(ScoreCell(panel="p", dgp=dgp, date=WHEN, rules=("ES(1)",), models=("A", "B"), scores=scores))
    return tensor


class TestRelativeScores:
    def test_self_ratio(self, rng):
        scores = rng.uniform(0.1, 3.0, 500)
        assert mean_relative_score(scores, scores) == (1.0, 0)

    def test_constant_ratio(self, rng):
        scores = rng.uniform(0.1, 3.0, 500)
        assert mean_relative_score(2 * scores, scores).value == 2.0

    def test_near_zero_dgp_scores_are_excluded(self):
        summary = mean_relative_score(np.array([1.0, 2.0, 3.0]), np.array([1.0, 0.0, 1e-13]))
        assert summary == (1.0, 2)
        np.testing.assert_array_equal(relative_scores(np.array([1.0, 2.0]), np.array([0.5, 0.0])), [2.0])

    def test_all_pairs_excluded(self):
        with pytest.raises(AllPairsExcluded):
            mean_relative_score(np.ones(4), np.zeros(4))

    def test_joint_rescaling(self, rng):
        m, dgp = rng.uniform(0.1, 2, 100), rng.uniform(0.1, 2, 100)
        assert mean_relative_score(7.5 * m, 7.5 * dgp).value == pytest.approx(mean_relative_score(m, dgp).value, rel=1e-12)

    def test_shifted_candidate_is_separated(self):
        rng = np.random.default_rng(5)
        realisations = rng.standard_normal((5000, 2))
        truth = energy_scores(ForecastEnsemble(rng.standard_normal((1000, 2))), realisations)
        shifted = energy_scores(ForecastEnsemble(rng.standard_normal((1000, 2)) + 0.5), realisations)
        assert mean_relative_score(shifted, truth).value > 1
        lower, _ = bootstrap_band(relative_scores(shifted, truth), subsample=5000, reps=2000, quantiles=(0.01, 0.99), seed=1)
        assert lower > 1


class TestDifferencesAndErrors:
    def test_identical_scores(self, rng):
        scores = rng.uniform(size=50)
        np.testing.assert_array_equal(score_differences(scores, scores), np.zeros(50))

    def test_constant_offset(self, rng):
        scores = rng.uniform(size=50)
        np.testing.assert_allclose(score_differences(scores + 0.25, scores), 0.25, atol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            score_differences(np.ones(3), np.ones(4))

    def test_ties_are_not_errors(self):
        assert error_rate(np.zeros(10)) == 0.0

    def test_error_fraction(self):
        assert error_rate(np.array([-1.0, 1.0, 1.0, 1.0])) == 0.25

    def test_empty(self):
        with pytest.raises(EmptyInput):
            error_rate(np.array([]))

    def test_rescaling_invariance(self, rng):
        m, dgp = rng.uniform(size=200), rng.uniform(size=200)
        assert error_rate(score_differences(3 * m, 3 * dgp)) == error_rate(score_differences(m, dgp))


class TestHeuristic:
    def test_single_model(self):
        assert discrimination_heuristic([1.7], 0) == 1.0

    def test_two_models(self):
        assert discrimination_heuristic([1.0, 3.0], 0) == 2.0

    def test_degenerate_dgp(self):
        with pytest.raises(DegenerateDgpScore):
            discrimination_heuristic([0.0, 1.0], 0)

    def test_lower_bound_and_rescaling(self, rng):
        means = rng.uniform(0.5, 2.0, 8)
        value = discrimination_heuristic(means, 3)
        assert value >= 1 / 8
        assert discrimination_heuristic(4 * means, 3) == pytest.approx(value, rel=1e-12)

    def test_pairwise_sensitivity(self):
        assert pairwise_sensitivity(3.0, 1.0) == 2.0
        with pytest.raises(DegenerateDgpScore):
            pairwise_sensitivity(1.0, 0.0)


class TestBootstrapBand:
    def test_constant_scores(self):
        assert bootstrap_band(np.full(500, 0.5), subsample=100, reps=200, seed=3) == (0.5, 0.5)

    def test_deterministic(self, rng):
        scores = rng.standard_normal(1000)
        assert bootstrap_band(scores, seed=9, reps=500) == bootstrap_band(scores, seed=9, reps=500)

    def test_subsample_too_large(self):
        with pytest.raises(SubsampleExceedsN):
            bootstrap_band(np.ones(50), subsample=100)

    def test_quartiles_of_a_mean_of_normals(self):
        bands = []
        for seed in range(50):
            scores = np.random.default_rng(1000 + seed).standard_normal(5000)
            bands.append(bootstrap_band(scores, subsample=100, reps=5000, seed=seed))
        lower, upper = np.mean(bands, axis=0)
        assert lower == pytest.approx(-0.0674, abs=0.01)
        assert upper == pytest.approx(0.0674, abs=0.01)


class TestKde:
    def test_density_integrates_to_one(self):
        sample = np.random.default_rng(2).standard_normal(100_000)
        kde = kde_differences(sample)
        assert kde.grid.size == 512
        assert integrate.trapezoid(kde.density, kde.grid) == pytest.approx(1.0, abs=0.01)
        assert kde.bandwidth == pytest.approx(1.06 * sample.std(ddof=1) * sample.size ** -0.2, rel=1e-6)

    def test_symmetric_sample(self):
        sample = np.random.default_rng(3).standard_normal(20_000)
        assert kde_differences(sample).negative_mass == pytest.approx(0.5, abs=0.01)

    def test_positive_sample(self, rng):
        kde = kde_differences(rng.uniform(1.0, 2.0, 1000))
        assert kde.negative_mass == 0.0
        assert kde.mean == pytest.approx(1.5, abs=0.05)

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            kde_differences(np.arange(5.0))

    def test_constant_sample(self):
        with pytest.raises(ConstantSample):
            kde_differences(np.zeros(100))


class TestMovingAverage:
    def test_constant(self):
        np.testing.assert_allclose(moving_average(np.full(20, 0.3)), 0.3, rtol=1e-14)

    def test_window_one(self, rng):
        series = rng.standard_normal(30)
        np.testing.assert_allclose(moving_average(series, 1), series, rtol=1e-14)

    def test_trailing_mean(self):
        result = moving_average(np.arange(1.0, 9.0), 8)
        assert result.shape == (8,)
        assert result[-1] == 4.5
        assert result[0] == 1.0
        assert result[1] == 1.5


class TestReport:
    def test_hand_built_tensor(self, two_model_tensor):
        report = build_report(two_model_tensor, reps=100)
        rows = report.rows

        def value(dgp: str, model: str, metric: str) -> float:
            (v,) = rows.loc[(rows.dgp == dgp) & (rows.model == model) & (rows.metric == metric), "value"]
            return v

        assert value("A", "B", "mean_relative_score") == 2.0
        assert value("A", "B", "error_rate") == 0.0
        assert value("B", "A", "error_rate") == 1.0
        assert value("A", "*", "discrimination_heuristic") == 1.5
        assert value("B", "*", "discrimination_heuristic") == 0.75
        assert value("A", "B", "band_lower") == value("A", "B", "band_upper") == 2.0

        rule = report.summary["rules"]["ES(1)"]
        assert rule["error_rate"] == 0.5
        assert rule["heuristic"] == pytest.approx(1.125)
        assert rule["propriety_share"] == 0.5
        assert report.summary["ordering"]["error_rate"] == ["ES(1)"]

        errors = report.figures["error_rates"]
        overall = errors[errors.dgp == "*"]
        assert overall["error_rate_joint"].tolist() == [0.5]
        assert set(report.figures["score_densities"]["dgp"]) == {"A", "B"}

    def test_absent_cells_are_echoed(self, two_model_tensor):
        two_model_tensor.absent.append(AbsentCell(panel="p", date=WHEN, model="C", reason="NonConvergence: test"))
        summary = build_report(two_model_tensor, reps=50).summary
        assert summary["absent_cells"] == 1
        assert summary["absent"][0]["model"] == "C"

    def test_empty_tensor(self):
        tensor = ScoreTensor(rules=("ES(1)", "VS(0.5)"), models=("A",), n_draws=10, subsample=5, root_seed=0)
        report = build_report(tensor)
        assert report.rows.empty
        assert report.summary["rules"]["ES(1)"]["error_rate"] is None
        assert report.summary["ordering"]["error_rate"] == []

    def test_written_files(self, two_model_tensor, tmp_path):
        report = build_report(two_model_tensor, reps=100)
        paths = write_report(report, tmp_path / "a")
        write_report(build_report(two_model_tensor, reps=100), tmp_path / "b")
        names = {p.relative_to(tmp_path / "a").as_posix() for p in paths}
        assert {"report.csv", "summary.json", "figures/error_rates.csv", "figures/heuristic.csv"} <= names
        for path in paths:
            assert path.read_bytes() == (tmp_path / "b" / path.relative_to(tmp_path / "a")).read_bytes()
        assert json.loads((tmp_path / "a" / "summary.json").read_text())["cells"] == 2
        frame = pd.read_csv(tmp_path / "a" / "report.csv")
        assert list(frame.columns) == ["panel", "rule", "dgp", "model", "date", "metric", "value"]
