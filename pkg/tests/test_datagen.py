import numpy as np
import pytest
from scipy.special import expit

from mvrank import datagen
from mvrank.core import EndpointKind
from mvrank.datagen import ScenarioConfig, cox_exponential_times, default_r_grid, equicorrelation
from mvrank.errors import ScenarioError


# ---------------------------------------------------------------------------
# ScenarioConfig
# ---------------------------------------------------------------------------

class TestScenarioConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"scenario": 4},
            {"scenario": 1, "m": 0},
            {"scenario": 1, "r": -0.5},
            {"scenario": 1, "rho": 1.0},
            {"scenario": 1, "rho": -0.2},
            {"scenario": 3, "rho": -0.3},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ScenarioError):
            ScenarioConfig(**kwargs)

    def test_scenario_two_ignores_rho(self):
        assert ScenarioConfig(2, rho=-0.9).d == 4

    def test_default_grid(self):
        assert default_r_grid(1) == (1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8, 3.0)
        assert default_r_grid(3)[0] == 0.0 and default_r_grid(3)[-1] == 1.0
        assert len(default_r_grid(2)) == 11

    def test_equicorrelation(self):
        np.testing.assert_allclose(equicorrelation(3, 0.3), [[1, 0.3, 0.3], [0.3, 1, 0.3], [0.3, 0.3, 1]])


# ---------------------------------------------------------------------------
# Scenario 1
# ---------------------------------------------------------------------------

class TestScenario1:
    def test_shape_and_schema(self):
        data = datagen.generate(ScenarioConfig(1, m=7, n=9, r=2.0))
        assert (data.m, data.n, data.d) == (7, 9, 8)
        assert set(data.schema) == {EndpointKind.CONTINUOUS}

    def test_deterministic(self):
        cfg = ScenarioConfig(1, r=1.5, rho=0.8, seed=42)
        a, b = datagen.generate(cfg), datagen.generate(cfg)
        np.testing.assert_array_equal(a.arm_x, b.arm_x)
        np.testing.assert_array_equal(a.arm_y, b.arm_y)

    def test_covariance(self):
        data = datagen.generate(ScenarioConfig(1, m=100_000, n=1, rho=0.3, seed=1))
        np.testing.assert_allclose(np.cov(data.arm_x, rowvar=False), equicorrelation(8, 0.3), atol=0.02)

    def test_independent_endpoints(self):
        data = datagen.generate(ScenarioConfig(1, m=20_000, n=1, rho=0.0, seed=2))
        corr = np.corrcoef(data.arm_x, rowvar=False)
        assert np.max(np.abs(corr - np.eye(8))) < 0.04

    def test_last_endpoint_has_no_effect(self):
        data = datagen.generate(ScenarioConfig(1, m=20_000, n=20_000, r=3.0, seed=3))
        assert abs(data.arm_y[:, 7].mean()) < 0.05
        assert data.arm_y[:, 0].mean() == pytest.approx(3.0, abs=0.05)

    def test_explicit_rng(self):
        cfg = ScenarioConfig(1, m=5, n=5)
        a = datagen.generate(cfg, rng=np.random.default_rng(0))
        b = datagen.generate(cfg, rng=np.random.default_rng(0))
        np.testing.assert_array_equal(a.arm_x, b.arm_x)

    def test_wrong_generator(self):
        with pytest.raises(ScenarioError):
            datagen.gen_scenario1(ScenarioConfig(2))


# ---------------------------------------------------------------------------
# Scenario 2
# ---------------------------------------------------------------------------

class TestScenario2:
    def test_schema(self):
        data = datagen.generate(ScenarioConfig(2, r=0.5))
        assert data.schema == (EndpointKind.CONTINUOUS,) * 3 + (EndpointKind.DISCRETE,)
        assert set(np.unique(data.pooled()[:, 3])) <= {0.0, 1.0}

    def test_means(self):
        data = datagen.generate(ScenarioConfig(2, m=100_000, n=100_000, r=1.0, seed=4))
        assert data.arm_x[:, 0].mean() == pytest.approx(150.0, abs=0.15)
        assert data.arm_y[:, 0].mean() == pytest.approx(140.0, abs=0.15)

    def test_binary_follows_logistic_link(self):
        data = datagen.generate(ScenarioConfig(2, m=100_000, n=1, r=0.0, seed=5))
        expected = expit(datagen.S2_LOGIT_INTERCEPT + data.arm_x[:, :3] @ datagen.S2_LOGIT_COEF).mean()
        assert data.arm_x[:, 3].mean() == pytest.approx(expected, abs=0.01)


# ---------------------------------------------------------------------------
# Scenario 3
# ---------------------------------------------------------------------------

class TestScenario3:
    def test_inverse_transform_by_hand(self):
        assert cox_exponential_times(np.exp(-1.0), 0.0) == pytest.approx(10.0)

    def test_invalid_uniform(self):
        with pytest.raises(ScenarioError):
            cox_exponential_times([0.0], [0.0])

    def test_schema_and_censoring(self):
        data = datagen.generate(ScenarioConfig(3, r=0.0, rho=0.6, seed=6))
        assert data.schema[0] is EndpointKind.TIME_TO_EVENT
        assert data.d == 6
        pooled, events = data.pooled(), data.pooled_events()
        assert np.all(pooled[:, 0] >= 0)
        assert np.all(pooled[~events, 0] <= datagen.S3_CENSOR_MAX)
        assert 0.0 < data.meta["censoring_fraction"] < 1.0

    def test_survival_curve_matches_exponential_law(self):
        rng = np.random.default_rng(7)
        linear_predictor = 0.7
        times = cox_exponential_times(1.0 - rng.random(100_000), linear_predictor)
        grid = np.linspace(0.0, 30.0, 301)
        empirical = (times[None, :] > grid[:, None]).mean(axis=1)
        closed_form = np.exp(-datagen.S3_BASELINE_HAZARD * np.exp(linear_predictor) * grid)
        assert np.max(np.abs(empirical - closed_form)) < 0.01

    def test_deterministic(self):
        cfg = ScenarioConfig(3, r=0.5, seed=8)
        a, b = datagen.generate(cfg), datagen.generate(cfg)
        np.testing.assert_array_equal(a.pooled(), b.pooled())
        np.testing.assert_array_equal(a.pooled_events(), b.pooled_events())


# ---------------------------------------------------------------------------
# Null configurations
# ---------------------------------------------------------------------------

class TestNullArms:
    @pytest.mark.parametrize("scenario", [1, 2, 3])
    def test_arms_share_one_law(self, scenario):
        cfg = ScenarioConfig(scenario, m=50_000, n=50_000, r=datagen.NULL_EFFECT[scenario], rho=0.3, seed=9)
        data = datagen.generate(cfg)
        scale = data.pooled().std(axis=0)
        np.testing.assert_allclose(data.arm_x.mean(axis=0) / scale, data.arm_y.mean(axis=0) / scale, atol=0.03)
        np.testing.assert_allclose(
            np.corrcoef(data.arm_x, rowvar=False), np.corrcoef(data.arm_y, rowvar=False), atol=0.03
        )
        if data.has_survival:
            assert data.events_x.mean() == pytest.approx(data.events_y.mean(), abs=0.015)
