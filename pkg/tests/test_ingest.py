from datetime import date

import numpy as np
import pytest

from scorebench.errors import (
    DegenerateColumn,
    InvalidPanel,
    MissingColumn,
    NonFiniteValue,
    NonMonotoneDates,
    NonPositiveLevel,
    UnparseableDate,
)
from scorebench.ingest import (
    ChangeMode,
    CsvSchema,
    GaussianSpec,
    PanelKind,
    RegimeSpec,
    TCopulaGarchSpec,
    generate_synthetic_panel,
    load_csv,
    reconstruct_levels,
    simulate_garch_paths,
    summary_statistics,
    to_changes,
    write_csv,
)


def _write(tmp_path, text: str):
    path = tmp_path / "panel.csv"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_well_formed_file(self, tmp_path):
        path = _write(tmp_path, "date,a,b\n2020-01-01,1.0,2.0\n2020-01-02,1.5,2.5\n2020-01-03,1.25,2.75\n")
        panel = load_csv(path)
        assert panel.T == 3
        assert panel.d == 2
        assert panel.kind is PanelKind.LEVELS
        assert panel.labels == ("a", "b")
        assert panel.dates[0] == date(2020, 1, 1)
        assert panel.name == "panel"

    def test_duplicated_date(self, tmp_path):
        path = _write(tmp_path, "date,a,b\n2020-01-01,1,2\n2020-01-02,1,2\n2020-01-02,1,2\n")
        with pytest.raises(NonMonotoneDates) as excinfo:
            load_csv(path)
        assert excinfo.value.row == 3

    def test_nan_value_names_row(self, tmp_path):
        path = _write(tmp_path, "date,a,b\n2020-01-01,1,2\n2020-01-02,NaN,2\n")
        with pytest.raises(NonFiniteValue) as excinfo:
            load_csv(path)
        assert excinfo.value.row == 2
        assert excinfo.value.column == "a"

    def test_empty_cell_is_rejected(self, tmp_path):
        path = _write(tmp_path, "date,a,b\n2020-01-01,1,\n")
        with pytest.raises(NonFiniteValue):
            load_csv(path)

    def test_malformed_date(self, tmp_path):
        path = _write(tmp_path, "date,a,b\n2020-01-01,1,2\n01/02/2020,1,2\n")
        with pytest.raises(UnparseableDate) as excinfo:
            load_csv(path)
        assert excinfo.value.row == 2

    def test_missing_columns(self, tmp_path):
        path = _write(tmp_path, "day,a,b\n2020-01-01,1,2\n")
        with pytest.raises(MissingColumn):
            load_csv(path)
        with pytest.raises(MissingColumn):
            load_csv(path, CsvSchema(date_column="day", columns=["a", "c"]))

    def test_column_subset(self, level_csv):
        panel = load_csv(level_csv, CsvSchema(columns=["silver", "gold"]))
        assert panel.labels == ("silver", "gold")
        assert panel.values[0].tolist() == [20.0, 100.0]

    def test_round_trip(self, level_csv, tmp_path):
        panel = load_csv(level_csv)
        out = tmp_path / "copy.csv"
        write_csv(panel, out)
        again = load_csv(out)
        assert again.dates == panel.dates
        np.testing.assert_array_equal(again.values, panel.values)


class TestChanges:
    def test_log_returns(self, make_panel):
        levels = np.array([[1.0, 2.0], [np.e, 2.0 * np.e], [np.e**2, 2.0 * np.e**2]])
        changes = to_changes(make_panel(levels), ChangeMode.LOG_RETURN)
        assert changes.T == 2
        assert changes.kind is PanelKind.LOG_RETURNS
        np.testing.assert_allclose(changes.values, 1.0, rtol=1e-12)

    def test_differences(self, make_panel):
        levels = np.array([[5.0, 1.0], [4.5, 1.0], [4.7, 2.0]])
        changes = to_changes(make_panel(levels), "difference")
        np.testing.assert_allclose(changes.values[:, 0], [-0.5, 0.2], atol=1e-12)
        assert changes.kind is PanelKind.DIFFERENCES

    def test_non_positive_level(self, make_panel):
        with pytest.raises(NonPositiveLevel):
            to_changes(make_panel(np.array([[1.0, 1.0], [-1.0, 1.0]])), "log-return")

    def test_changes_of_changes_are_rejected(self, make_panel):
        changes = to_changes(make_panel(np.array([[1.0, 1.0], [2.0, 2.0]])))
        with pytest.raises(InvalidPanel):
            to_changes(changes)

    @pytest.mark.parametrize("mode", ["log-return", "difference"])
    def test_reconstruction_recovers_levels(self, level_csv, mode):
        panel = load_csv(level_csv)
        changes = to_changes(panel, mode)
        rebuilt = reconstruct_levels(changes, panel.values[0], panel.dates[0])
        assert rebuilt.dates == panel.dates
        np.testing.assert_allclose(rebuilt.values, panel.values, rtol=1e-12)


class TestSummaryStatistics:
    def test_gaussian_kurtosis(self, make_panel, rng):
        stats = summary_statistics(make_panel(rng.standard_normal((200_000, 2))))
        assert stats.kurtosis == pytest.approx([3.0, 3.0], abs=0.05)
        assert np.all(stats.volatility > 0)

    def test_symmetric_column(self, make_panel):
        a = 0.7
        stats = summary_statistics(make_panel(np.array([[-a, 1.0], [a, 2.0], [-a, 4.0], [a, 3.0]])))
        assert stats.mean[0] == pytest.approx(0.0)
        assert stats.skewness[0] == pytest.approx(0.0)
        assert stats.rows()[0]["asset"] == "x0"

    def test_constant_column(self, make_panel):
        with pytest.raises(DegenerateColumn):
            summary_statistics(make_panel(np.array([[1.0, 1.0], [1.0, 2.0], [1.0, 4.0], [1.0, 3.0]])))


class TestSyntheticPanels:
    def test_deterministic(self):
        spec = GaussianSpec()
        first = generate_synthetic_panel(spec, T=500, d=3, seed=7)
        second = generate_synthetic_panel(spec, T=500, d=3, seed=7)
        np.testing.assert_array_equal(first.values, second.values)
        assert first.dates == second.dates
        assert first.metadata["seed"] == 7

    def test_independent_gaussian_columns(self):
        panel = generate_synthetic_panel(GaussianSpec(correlation=0.0), T=100_000, d=3, seed=1)
        corr = np.corrcoef(panel.values.T)
        assert np.all(np.abs(corr[np.triu_indices(3, k=1)]) < 0.02)

    def test_business_day_dates(self):
        panel = generate_synthetic_panel(GaussianSpec(start=date(2021, 1, 1)), T=10, d=2, seed=0)
        assert panel.dates[0] == date(2021, 1, 1)
        assert all(d.weekday() < 5 for d in panel.dates)

    def test_garch_volatility_clustering(self):
        spec = TCopulaGarchSpec(alpha=0.08, beta=0.90, nu=10.0)
        panel = generate_synthetic_panel(spec, T=20_000, d=2, seed=3)
        squared = panel.values[:, 0] ** 2
        lag1 = np.corrcoef(squared[:-1], squared[1:])[0, 1]
        assert lag1 > 0

    def test_levels_output(self):
        panel = generate_synthetic_panel(RegimeSpec(output="levels"), T=300, d=2, seed=5)
        assert panel.kind is PanelKind.LEVELS
        assert np.all(panel.values > 0)
        assert to_changes(panel).T == 299

    def test_differences_are_level_increments(self):
        levels = generate_synthetic_panel(GaussianSpec(output="levels", start_level=50.0), T=200, d=2, seed=4)
        differences = generate_synthetic_panel(GaussianSpec(output="differences", start_level=50.0), T=200, d=2, seed=4)
        returns = generate_synthetic_panel(GaussianSpec(start_level=50.0), T=200, d=2, seed=4)
        assert differences.kind is PanelKind.DIFFERENCES
        np.testing.assert_allclose(differences.values[1:], np.diff(levels.values, axis=0))
        np.testing.assert_allclose(differences.values[0], levels.values[0] - 50.0)
        np.testing.assert_allclose(50.0 + np.cumsum(differences.values, axis=0), levels.values)
        assert not np.allclose(differences.values, returns.values)

    def test_stationarity_is_validated(self):
        with pytest.raises(ValueError):
            TCopulaGarchSpec(alpha=0.2, beta=0.85)

    def test_preconditions(self):
        with pytest.raises(InvalidPanel):
            generate_synthetic_panel(GaussianSpec(), T=10, d=1, seed=0)
        with pytest.raises(InvalidPanel):
            generate_synthetic_panel(GaussianSpec(), T=0, d=2, seed=0)
        with pytest.raises(InvalidPanel):
            generate_synthetic_panel(GaussianSpec(correlation=[[1.0, 0.5], [0.5, 1.0]]), T=10, d=3, seed=0)


@pytest.mark.slow
def test_garch_unconditional_variance():
    omega, alpha, beta = 1e-6, 0.05, 0.90
    innovations = np.random.default_rng(11).standard_normal((1_000_000, 1))
    returns = simulate_garch_paths(omega, alpha, beta, innovations)
    assert returns.var() == pytest.approx(omega / (1 - alpha - beta), rel=0.05)
