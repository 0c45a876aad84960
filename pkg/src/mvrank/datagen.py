"""Simulation scenarios: Gaussian endpoints, a mixed continuous/binary design and a censored Cox design."""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.special import expit

from mvrank._streams import substream
from mvrank.core import EndpointKind, TwoSampleData
from mvrank.errors import ScenarioError

logger = logging.getLogger(__name__)

SCENARIOS = (1, 2, 3)
GRID_POINTS = 11

# Scenario 1: eight equicorrelated Gaussian endpoints, arm y mean scaled by r.
S1_MEAN = np.array([1.0, 0.1, 0.2, 0.3, 0.1, 0.8, 0.1, 0.0])

# Scenario 2: three Gaussian endpoints plus a Bernoulli one with a logistic link.
S2_MEAN = np.array([150.0, 6.0, 250.0])
S2_SHIFT = np.array([10.0, 0.1, 10.0])
S2_COV = np.array([
    [100.0, 7.0, 0.6],
    [7.0, 1.0, 0.4],
    [0.6, 0.4, 225.0],
])
S2_LOGIT_COEF = np.array([0.1, 0.4, 0.1])
S2_LOGIT_INTERCEPT = -3.0

# Scenario 3: five Gaussian covariates driving an exponential Cox survival time.
S3_MEAN = np.array([3.0, 2.0, 2.0, 1.0, 1.0])
S3_SHIFT = np.array([1.0, 0.1, 0.0, 0.1, 0.2])
S3_COX_COEF = np.array([0.5, 0.2, 0.3, 0.3, 0.5])
S3_BASELINE_HAZARD = 0.1
S3_CENSOR_MAX = 3.0

SCENARIO_DIMENSION = {1: 8, 2: 4, 3: 6}
NULL_EFFECT = {1: 1.0, 2: 0.0, 3: 0.0}
R_RANGE = {1: (1.0, 3.0), 2: (0.0, 1.0), 3: (0.0, 1.0)}


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulated trial: scenario number, arm sizes, effect multiplier ``r``, correlation ``rho``."""

    scenario: int
    m: int = 50
    n: int = 50
    r: float = 1.0
    rho: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ScenarioError(f"scenario must be one of {SCENARIOS}, got {self.scenario}")
        if self.m < 1 or self.n < 1:
            raise ScenarioError(f"Arm sizes must be positive, got m={self.m} n={self.n}")
        if not np.isfinite(self.r) or self.r < 0:
            raise ScenarioError(f"r must be a non-negative number, got {self.r}")
        if self.scenario != 2:
            size = S1_MEAN.size if self.scenario == 1 else S3_MEAN.size
            lower = -1.0 / (size - 1)
            if not lower < self.rho < 1.0:
                raise ScenarioError(
                    f"rho must lie in ({lower:.4g}, 1) for a positive definite {size}x{size} "
                    f"equicorrelation matrix, got {self.rho}"
                )

    @property
    def d(self) -> int:
        return SCENARIO_DIMENSION[self.scenario]


def equicorrelation(size: int, rho: float) -> np.ndarray:
    """Unit variances with common off-diagonal correlation ``rho``."""
    cov = np.full((size, size), float(rho))
    np.fill_diagonal(cov, 1.0)
    return cov


def _cholesky(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as e:
        raise ScenarioError(f"Covariance matrix is not positive definite: {e}") from e


def _gaussian(rng: np.random.Generator, size: int, mean: np.ndarray, chol: np.ndarray) -> np.ndarray:
    return mean + rng.standard_normal((size, mean.size)) @ chol.T


def cox_exponential_times(
    u: npt.ArrayLike,
    linear_predictor: npt.ArrayLike,
    baseline_hazard: float = S3_BASELINE_HAZARD,
) -> np.ndarray:
    """Inverse-probability transform T = -log(U) / (lambda * exp(beta'x)) for a constant baseline hazard."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u > 1)):
        raise ScenarioError("Uniform draws must lie in (0, 1]")
    if baseline_hazard <= 0:
        raise ScenarioError(f"baseline_hazard must be positive, got {baseline_hazard}")
    return -np.log(u) / (baseline_hazard * np.exp(np.asarray(linear_predictor, dtype=float)))


def default_r_grid(scenario: int) -> tuple[float, ...]:
    """Evenly spaced effect multipliers over the scenario's range of r."""
    if scenario not in R_RANGE:
        raise ScenarioError(f"scenario must be one of {SCENARIOS}, got {scenario}")
    low, high = R_RANGE[scenario]
    return tuple(round(float(v), 10) for v in np.linspace(low, high, GRID_POINTS))


def _rng(cfg: ScenarioConfig, rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else substream(cfg.seed, "scenario", cfg.scenario)


def gen_scenario1(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> TwoSampleData:
    if cfg.scenario != 1:
        raise ScenarioError(f"gen_scenario1 called with scenario {cfg.scenario}")
    rng = _rng(cfg, rng)
    chol = _cholesky(equicorrelation(S1_MEAN.size, cfg.rho))
    x = _gaussian(rng, cfg.m, S1_MEAN, chol)
    y = _gaussian(rng, cfg.n, cfg.r * S1_MEAN, chol)
    return TwoSampleData(
        arm_x=x,
        arm_y=y,
        schema=(EndpointKind.CONTINUOUS,) * S1_MEAN.size,
        meta={"scenario": 1, "r": cfg.r, "rho": cfg.rho, "seed": cfg.seed},
    )


def gen_scenario2(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> TwoSampleData:
    """Arm x: N(mu, Sigma); arm y: N(mu - r*nu, Sigma); fourth endpoint Bernoulli(expit(-3 + beta'x))."""
    if cfg.scenario != 2:
        raise ScenarioError(f"gen_scenario2 called with scenario {cfg.scenario}")
    rng = _rng(cfg, rng)
    chol = _cholesky(S2_COV)

    def arm(size: int, mean: np.ndarray) -> np.ndarray:
        continuous = _gaussian(rng, size, mean, chol)
        p = expit(S2_LOGIT_INTERCEPT + continuous @ S2_LOGIT_COEF)
        binary = (rng.random(size) < p).astype(float)
        return np.column_stack([continuous, binary])

    x = arm(cfg.m, S2_MEAN)
    y = arm(cfg.n, S2_MEAN - cfg.r * S2_SHIFT)
    return TwoSampleData(
        arm_x=x,
        arm_y=y,
        schema=(EndpointKind.CONTINUOUS,) * 3 + (EndpointKind.DISCRETE,),
        meta={"scenario": 2, "r": cfg.r, "seed": cfg.seed},
    )


def gen_scenario3(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> TwoSampleData:
    """Survival time min(T, C) with Cox exponential T and C ~ U(0, 3), followed by the five covariates."""
    if cfg.scenario != 3:
        raise ScenarioError(f"gen_scenario3 called with scenario {cfg.scenario}")
    rng = _rng(cfg, rng)
    chol = _cholesky(equicorrelation(S3_MEAN.size, cfg.rho))

    def arm(size: int, mean: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        covariates = _gaussian(rng, size, mean, chol)
        u = 1.0 - rng.random(size)
        t = cox_exponential_times(u, covariates @ S3_COX_COEF)
        c = rng.uniform(0.0, S3_CENSOR_MAX, size)
        observed = np.minimum(t, c)
        return np.column_stack([observed, covariates]), t <= c

    x, events_x = arm(cfg.m, S3_MEAN)
    y, events_y = arm(cfg.n, S3_MEAN - cfg.r * S3_SHIFT)
    censored = 1.0 - float(np.concatenate([events_x, events_y]).mean())
    logger.debug("Scenario 3 r=%s rho=%s: censored fraction %.3f", cfg.r, cfg.rho, censored)
    return TwoSampleData(
        arm_x=x,
        arm_y=y,
        schema=(EndpointKind.TIME_TO_EVENT,) + (EndpointKind.CONTINUOUS,) * S3_MEAN.size,
        names=("time",) + tuple(f"covariate{k + 1}" for k in range(S3_MEAN.size)),
        events_x=events_x,
        events_y=events_y,
        meta={"scenario": 3, "r": cfg.r, "rho": cfg.rho, "seed": cfg.seed, "censoring_fraction": censored},
    )


_GENERATORS = {1: gen_scenario1, 2: gen_scenario2, 3: gen_scenario3}


def generate(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> TwoSampleData:
    """Draws one trial for ``cfg``; without ``rng`` the draw is a pure function of ``cfg``."""
    return _GENERATORS[cfg.scenario](cfg, rng)
