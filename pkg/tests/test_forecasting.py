import logging
import math
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest
from scipy import stats

from scorebench.errors import (
    CalibrationError,
    DegenerateColumn,
    InsufficientWindow,
    InvalidModelSpec,
    ModelDocumentError,
    NonConvergence,
    RankDeficientWindow,
)
from scorebench.forecasting import (
    CopulaKind,
    EdfCopulaModel,
    EgarchTParams,
    FqModel,
    ModelFamily,
    ModelSpec,
    MonotoneQuantileCurve,
    MvGarchModel,
    PointMassModel,
    clip_correlation,
    cov_to_corr,
    dcc_correlations,
    default_roster,
    fit_edf_copula,
    fit_egarch_t,
    fit_fq,
    fit_model,
    fit_mv_garch,
    model_from_document,
    model_to_document,
    monotone_quantile_curve,
    pca_factors,
    pinball_loss,
    principal_components,
    quantile_regression,
    sample_edf_copula,
    sample_fq,
    sample_model,
    sample_mv_garch,
    simulate_egarch_t,
    standardized_t_abs_mean,
)
from scorebench.forecasting import mv_garch
from scorebench.forecasting.egarch import egarch_log_variance
from scorebench.forecasting.factor_quantile import factor_quantile_coefficients
from scorebench.forecasting.mv_garch import _fit_dcc_parameters


def flat_params(variance: float, nu: float = 8.0) -> EgarchTParams:
    """EGARCH parameters whose next variance is exactly ``variance``."""
    return EgarchTParams(omega=math.log(variance), alpha=0.0, gamma=0.0, beta=0.0, nu=nu, last_variance=variance, last_residual=0.0)


class TestEdfCopula:
    def test_comonotone_columns(self, rng):
        x = rng.standard_normal(500)
        model = fit_edf_copula(np.column_stack([x, np.exp(x)]))
        assert model.correlation[0, 1] >= 0.99

    def test_independent_columns(self, rng):
        model = fit_edf_copula(rng.standard_normal((2000, 2)))
        assert abs(model.correlation[0, 1]) < 0.08

    def test_unit_diagonal(self, rng):
        model = fit_edf_copula(rng.standard_t(4, size=(300, 5)))
        np.testing.assert_array_equal(np.diag(model.correlation), np.ones(5))
        assert np.linalg.eigvalsh(model.correlation).min() >= -1e-10

    def test_independent_copula(self, rng):
        model = fit_edf_copula(rng.standard_normal((100, 3)), copula=CopulaKind.INDEPENDENT)
        np.testing.assert_array_equal(model.correlation, np.eye(3))

    def test_constant_column(self, rng):
        window = np.column_stack([rng.standard_normal(50), np.ones(50)])
        with pytest.raises(DegenerateColumn):
            fit_edf_copula(window)

    def test_constant_support_sampling(self):
        model = EdfCopulaModel(support=np.tile([1.5, -2.0], (10, 1)), correlation=np.eye(2))
        draws = sample_edf_copula(model, 100, rng=3).draws
        assert np.all(draws == [1.5, -2.0])

    def test_independent_sampling_has_no_rank_correlation(self, rng):
        model = EdfCopulaModel(support=np.sort(rng.standard_normal((250, 2)), axis=0), correlation=np.eye(2))
        draws = sample_edf_copula(model, 100_000, rng=4).draws
        assert abs(stats.spearmanr(draws[:, 0], draws[:, 1])[0]) < 0.02

    def test_draws_come_from_the_support(self, rng):
        window = rng.standard_normal((250, 3))
        model = fit_edf_copula(window)
        draws = sample_edf_copula(model, 1000, rng=5).draws
        for j in range(3):
            assert np.isin(draws[:, j], window[:, j]).all()

    def test_deterministic_sampling(self, rng):
        model = fit_edf_copula(rng.standard_normal((250, 3)))
        np.testing.assert_array_equal(sample_edf_copula(model, 50, rng=9).draws, sample_edf_copula(model, 50, rng=9).draws)

    def test_clip_correlation(self):
        broken = np.array([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
        fixed = clip_correlation(broken)
        assert np.linalg.eigvalsh(fixed).min() >= -1e-12
        np.testing.assert_array_equal(np.diag(fixed), np.ones(3))
        np.testing.assert_allclose(fixed, fixed.T)


class TestPrincipalComponents:
    def test_comonotone_pair(self, rng):
        x = rng.standard_normal(1000)
        window = np.column_stack([x, x + 1e-9 * rng.standard_normal(1000)])
        first = pca_factors(window, "first", 1)[:, 0]
        last = pca_factors(window, "last", 1)[:, 0]
        assert abs(np.corrcoef(first, x)[0, 1]) > 0.9999
        assert last.var() < 1e-12

    def test_identity_covariance(self):
        window = np.random.default_rng(3).standard_normal((100_000, 4))
        eigenvalues, _ = principal_components(window)
        assert eigenvalues.max() / eigenvalues.min() < 1.05
        assert np.all(np.diff(eigenvalues) <= 0)

    def test_sign_convention(self, rng):
        _, vectors = principal_components(rng.standard_normal((200, 4)) @ rng.standard_normal((4, 4)))
        pivots = np.abs(vectors).argmax(axis=0)
        assert np.all(vectors[pivots, np.arange(4)] > 0)

    def test_first_and_last_span_everything(self, rng):
        window = rng.standard_normal((50, 3)) @ np.array([[1.0, 0.3, 0.0], [0.0, 1.0, 0.5], [0.2, 0.0, 1.0]])
        factors = np.column_stack([pca_factors(window, "first", 2), pca_factors(window, "last", 1)])
        centred = window - window.mean(axis=0)
        projector_f = factors @ np.linalg.pinv(factors)
        projector_x = centred @ np.linalg.pinv(centred)
        assert np.abs(projector_f - projector_x).max() < 1e-8

    def test_rank_deficient(self, rng):
        x = rng.standard_normal(100)
        with pytest.raises(RankDeficientWindow):
            pca_factors(np.column_stack([x, 2 * x, rng.standard_normal(100)]), "first", 1)

    def test_factor_count_must_be_below_dimension(self, rng):
        with pytest.raises(InvalidModelSpec):
            pca_factors(rng.standard_normal((100, 2)), "first", 2)


class TestQuantileRegression:
    @pytest.mark.parametrize("tau", [0.1, 0.5, 0.9])
    def test_noiseless_line(self, rng, tau):
        x = rng.standard_normal(200)
        X = np.column_stack([np.ones(200), x])
        np.testing.assert_allclose(quantile_regression(X, 2 * x + 1, tau), [1.0, 2.0], atol=1e-4)

    def test_gaussian_quantile_gap(self):
        rng = np.random.default_rng(31)
        x = rng.standard_normal(100_000)
        y = x + rng.standard_normal(100_000)
        X = np.column_stack([np.ones_like(x), x])
        gap = quantile_regression(X, y, 0.9)[0] - quantile_regression(X, y, 0.5)[0]
        assert gap == pytest.approx(stats.norm.ppf(0.9), abs=0.05)

    def test_median_regression_matches_grid_search(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal(20)
        y = 0.5 + 1.5 * x + rng.standard_t(3, size=20)
        X = np.column_stack([np.ones(20), x])
        coef = quantile_regression(X, y, 0.5)

        grid = np.arange(-4.0, 4.0, 0.01)
        b0, b1 = np.meshgrid(grid, grid, indexing="ij")
        residuals = y[None, None, :] - b0[..., None] - b1[..., None] * x[None, None, :]
        losses = pinball_loss(residuals, 0.5)
        i, j = np.unravel_index(losses.argmin(), losses.shape)
        assert coef == pytest.approx([grid[i], grid[j]], abs=0.05)
        assert pinball_loss(y - X @ coef, 0.5) <= losses.min() + 1e-6

    def test_invalid_level(self, rng):
        X = np.column_stack([np.ones(10), rng.standard_normal(10)])
        with pytest.raises(InvalidModelSpec):
            quantile_regression(X, rng.standard_normal(10), 1.0)


class TestMonotoneQuantileCurve:
    def test_hits_knots(self):
        curve = monotone_quantile_curve(np.array([0.25, 0.5, 0.75]), np.array([-1.0, 0.0, 1.0]))
        assert curve(np.array([0.5]))[0] == 0.0

    def test_crossing_is_rearranged(self):
        curve = monotone_quantile_curve(np.array([0.25, 0.5, 0.75]), np.array([0.0, -1.0, 1.0]))
        np.testing.assert_array_equal(curve.quantiles, [-1.0, 0.0, 1.0])
        values = curve(np.linspace(0.001, 0.999, 2001))
        assert np.all(np.diff(values) >= 0)

    def test_dense_gaussian_quantiles(self):
        taus = np.linspace(0.01, 0.99, 99)
        curve = monotone_quantile_curve(taus, stats.norm.ppf(taus))
        assert curve(np.array([0.975]))[0] == pytest.approx(1.95996, abs=0.01)

    def test_flat_extrapolation(self):
        curve = monotone_quantile_curve(np.array([0.1, 0.9]), np.array([-2.0, 3.0]))
        np.testing.assert_array_equal(curve(np.array([0.0001, 0.9999])), [-2.0, 3.0])

    def test_monotone_on_irregular_data(self, rng):
        taus = np.sort(rng.uniform(0.01, 0.99, 15))
        curve = monotone_quantile_curve(taus, np.cumsum(rng.exponential(size=15) * (rng.random(15) > 0.3)))
        assert np.all(np.diff(curve(np.linspace(0, 1, 5001))) >= -1e-12)

    def test_invalid_levels(self):
        with pytest.raises(InvalidModelSpec):
            MonotoneQuantileCurve(np.array([0.5, 0.4]), np.array([0.0, 1.0]))


class TestFactorQuantile:
    def test_gaussian_medians(self):
        window = np.random.default_rng(12).standard_normal((2000, 3))
        model = fit_fq(window, "AL", m=1)
        assert model.coefficients.shape == (3, 19, 2)
        for curve in model.curves:
            assert curve(np.array([0.5]))[0] == pytest.approx(0.0, abs=0.1)

    def test_single_identity_bag(self, rng):
        window = rng.standard_normal((250, 3))
        model = fit_fq(window, "AB", m=2, bags=1, resample=False)
        expected = factor_quantile_coefficients(window, "first", 2, model.taus)
        np.testing.assert_array_equal(model.coefficients, expected)

    def test_deterministic_given_seed(self, rng):
        window = rng.standard_normal((250, 3))
        first = fit_fq(window, "AB", bags=3, rng=11)
        second = fit_fq(window, "AB", bags=3, rng=11)
        np.testing.assert_array_equal(first.coefficients, second.coefficients)
        np.testing.assert_array_equal(sample_fq(first, 20, rng=1).draws, sample_fq(second, 20, rng=1).draws)

    def test_constant_handles(self):
        taus = np.array([0.25, 0.5, 0.75])
        curves = (MonotoneQuantileCurve(taus, np.full(3, 2.0)), MonotoneQuantileCurve(taus, np.full(3, -1.0)))
        model = FqModel(variant="AL", m=1, taus=taus, coefficients=np.zeros((2, 3, 2)), curves=curves, correlation=np.eye(2))
        assert np.all(sample_fq(model, 50, rng=0).draws == [2.0, -1.0])

    def test_marginal_quantiles_follow_handles(self):
        window = np.random.default_rng(13).standard_normal((2000, 3))
        model = fit_fq(window, "AL")
        draws = sample_fq(model, 100_000, rng=2).draws
        levels = np.array([0.25, 0.5, 0.75])
        for j, curve in enumerate(model.curves):
            np.testing.assert_allclose(np.quantile(draws[:, j], levels), curve(levels), atol=0.03)

    def test_too_many_factors(self, rng):
        with pytest.raises(InvalidModelSpec):
            fit_fq(rng.standard_normal((100, 2)), "AB", m=2)


class TestEgarch:
    def test_expected_absolute_value(self):
        assert standardized_t_abs_mean(1e6) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-4)
        draws = np.random.default_rng(1).standard_t(6, 1_000_000) * math.sqrt(4 / 6)
        assert standardized_t_abs_mean(6.0) == pytest.approx(np.abs(draws).mean(), rel=5e-3)

    def test_constant_series(self):
        with pytest.raises(NonConvergence):
            fit_egarch_t(np.full(300, 0.01))

    def test_fit_on_simulated_series(self):
        truth = EgarchTParams(omega=-0.1, alpha=0.1, gamma=-0.05, beta=0.95, nu=7.0, last_variance=1.0, last_residual=0.0)
        series = simulate_egarch_t(truth, 2000, rng=4)
        fitted = fit_egarch_t(series)
        assert abs(fitted.beta) < 1
        assert fitted.nu > 2
        assert fitted.next_variance() > 0
        assert math.isfinite(fitted.unconditional_variance())

    def test_simulation_is_deterministic(self):
        params = flat_params(1e-4)
        np.testing.assert_array_equal(simulate_egarch_t(params, 100, rng=3), simulate_egarch_t(params, 100, rng=3))

    @pytest.mark.slow
    def test_parameter_recovery(self):
        truth = EgarchTParams(omega=-0.1, alpha=0.1, gamma=-0.05, beta=0.95, nu=7.0, last_variance=1.0, last_residual=0.0)
        recovered = 0
        for seed in range(100):
            fitted = fit_egarch_t(simulate_egarch_t(truth, 20_000, rng=seed))
            recovered += abs(fitted.beta - truth.beta) <= 0.03 and fitted.gamma < 0
        assert recovered >= 95

    def test_one_step_variance_matches_recursion(self, rng):
        params = EgarchTParams(omega=-0.2, alpha=0.15, gamma=-0.08, beta=0.9, nu=5.0, last_variance=1.0, last_residual=0.0)
        eps = rng.standard_normal(50)
        log_var = egarch_log_variance(params.omega, params.alpha, params.gamma, params.beta, params.nu, eps, 0.0)
        z = eps[-2] * math.exp(-0.5 * log_var[-2])
        previous = replace(params, last_variance=math.exp(log_var[-2]), last_residual=z)
        assert previous.next_variance() == pytest.approx(math.exp(log_var[-1]), rel=1e-12)

    @pytest.mark.slow
    def test_iid_gaussian_series(self):
        series = np.random.default_rng(6).standard_normal(20_000) * 0.01
        fitted = fit_egarch_t(series)
        assert abs(fitted.alpha) < 0.05
        assert fitted.unconditional_variance() == pytest.approx(series.var(), rel=0.05)


class TestMvGarch:
    def test_short_window(self, rng):
        with pytest.raises(InsufficientWindow):
            fit_mv_garch(rng.standard_normal((250, 2)), "CCC")

    def test_dcc_correlations_have_unit_diagonal(self, rng):
        z = rng.standard_normal((500, 3))
        path = dcc_correlations(0.05, 0.9, np.cov(z, rowvar=False), z)
        assert path.shape == (501, 3, 3)
        for corr in path:
            np.testing.assert_allclose(np.diag(corr), 1.0, atol=1e-12)

    def test_static_dcc_reproduces_ccc(self, rng):
        z = rng.standard_normal((300, 2)) @ np.array([[1.0, 0.5], [0.0, 1.0]])
        qbar = np.cov(z, rowvar=False)
        assert np.array_equal(dcc_correlations(0.0, 0.0, qbar, z)[-1], cov_to_corr(qbar))
        univariate = (flat_params(1e-4), flat_params(4e-4))
        ccc = MvGarchModel(kind="CCC", univariate=univariate, correlation=cov_to_corr(qbar))
        dcc = MvGarchModel(kind="DCC", univariate=univariate, correlation=cov_to_corr(qbar), qbar=qbar, q_next=qbar.copy())
        np.testing.assert_array_equal(sample_mv_garch(ccc, 200, rng=5).draws, sample_mv_garch(dcc, 200, rng=5).draws)

    def test_uncorrelated_sampling(self):
        model = MvGarchModel(kind="CCC", univariate=(flat_params(1e-4), flat_params(1e-4)), correlation=np.eye(2))
        draws = sample_mv_garch(model, 100_000, rng=6).draws
        assert abs(np.corrcoef(draws.T)[0, 1]) < 0.02

    def test_sample_covariance(self):
        corr = np.array([[1.0, 0.6], [0.6, 1.0]])
        variances = np.array([1e-4, 9e-4])
        model = MvGarchModel(kind="CCC", univariate=tuple(flat_params(v) for v in variances), correlation=corr)
        draws = sample_mv_garch(model, 1_000_000, rng=7).draws
        target = np.sqrt(np.outer(variances, variances)) * corr
        error = np.linalg.norm(np.cov(draws.T) - target) / np.linalg.norm(target)
        assert error < 0.03

    @pytest.mark.slow
    def test_dcc_without_dynamics(self):
        rng = np.random.default_rng(2)
        corr = np.array([[1.0, 0.5], [0.5, 1.0]])
        window = 0.01 * rng.multivariate_normal(np.zeros(2), corr, size=2000)
        cache: dict = {}
        ccc = fit_mv_garch(window, "CCC", univariate_cache=cache)
        dcc = fit_mv_garch(window, "DCC", univariate_cache=cache)
        assert ccc.univariate == dcc.univariate
        assert dcc.dcc_a + dcc.dcc_b < 0.1
        assert np.abs(cov_to_corr(dcc.q_next) - ccc.correlation).max() < 0.05

    def test_unknown_kind(self, rng):
        with pytest.raises(InvalidModelSpec):
            fit_mv_garch(rng.standard_normal((2000, 2)), "BEKK")

    def test_small_a_keeps_estimated_b(self, rng, monkeypatch, caplog):
        z = np.ascontiguousarray(rng.standard_normal((500, 2)))
        qbar = np.cov(z, rowvar=False)
        null_value = -mv_garch.dcc_loglik(0.0, 0.0, qbar, z)

        def fake_minimize(objective, start, args, method, options):
            return SimpleNamespace(x=np.array([5e-4, 0.9]), fun=null_value - 50.0)

        monkeypatch.setattr(mv_garch, "minimize", fake_minimize)
        with caplog.at_level(logging.WARNING, logger="scorebench"):
            a, b = _fit_dcc_parameters(qbar, z)
        assert (a, b) == (5e-4, 0.9)
        assert "weakly identified" in caplog.text


class TestRosterAndDocuments:
    def test_default_roster(self):
        names = [spec.name for spec in default_roster()]
        assert names == ["EDF_250", "FQ-AL_250", "FQ-AB_250", "EDF_2000", "FQ-AL_2000", "FQ-AB_2000", "CCC-GARCH", "DCC-GARCH"]

    def test_model_spec_defaults(self):
        assert ModelSpec(name="a", family=ModelFamily.FQ_AL).n_factors == 1
        assert ModelSpec(name="b", family=ModelFamily.FQ_AB).n_factors == 2
        with pytest.raises(ValueError):
            ModelSpec(name="c", family=ModelFamily.FQ_AL, quantiles=(0.5, 0.4))

    def test_window_length_is_enforced(self, rng):
        with pytest.raises(InvalidModelSpec):
            fit_model(ModelSpec(name="EDF", family=ModelFamily.EDF, window=100), rng.standard_normal((99, 2)))

    def test_garch_on_short_window_is_a_calibration_error(self, rng):
        spec = ModelSpec(name="CCC", family=ModelFamily.CCC_GARCH, window=250)
        with pytest.raises(CalibrationError):
            fit_model(spec, rng.standard_normal((250, 2)))

    def test_point_mass(self, rng):
        window = rng.standard_normal((50, 3))
        model = fit_model(ModelSpec(name="P", family=ModelFamily.POINT_MASS, window=50), window)
        ensemble = sample_model(model, 10, rng=0)
        np.testing.assert_allclose(ensemble.draws, np.tile(window.mean(axis=0), (10, 1)))
        assert ensemble.model_id == "P"

    def test_documents_round_trip(self, rng):
        window = rng.standard_normal((250, 3))
        models = [
            fit_model(ModelSpec(name="EDF_250", family=ModelFamily.EDF), window),
            fit_model(ModelSpec(name="FQ-AL_250", family=ModelFamily.FQ_AL), window),
            PointMassModel(location=np.array([0.1, 0.2, 0.3]), name="P"),
            MvGarchModel(kind="DCC", univariate=(flat_params(1e-4),) * 3, correlation=np.eye(3), qbar=np.eye(3), q_next=np.eye(3), name="DCC"),
        ]
        for model in models:
            text = model_to_document(model, seed_lineage=(0, "panel", "EDF")).model_dump_json()
            restored = model_from_document(text)
            assert restored.name == model.name
            np.testing.assert_array_equal(sample_model(restored, 30, rng=1).draws, sample_model(model, 30, rng=1).draws)

    def test_foreign_document(self):
        document = model_to_document(PointMassModel(location=np.zeros(2))).model_dump()
        document["schema_version"] = 2
        with pytest.raises(ModelDocumentError):
            model_from_document(document)
        document["schema_version"] = 1
        document["parameters"] = {}
        with pytest.raises(ModelDocumentError):
            model_from_document(document)
