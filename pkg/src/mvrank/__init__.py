from . import errors
from .assign import Assignment, AssignmentProblem, brute_force_lap, solve_lap
from .baselines import ScoreMap, obrien_test, pair_scores, permutation_test, u_statistic
from .censored import SurvivalColumn, gehan_pair_score, gehan_scores, test_with_survival
from .core import EndpointKind, TestOutcome, TwoSampleData, parse_dataset, parse_schema, write_dataset
from .datagen import ScenarioConfig
from .energytest import (
    CalibrationCache,
    CalibrationEntry,
    calibrate_threshold,
    decide,
    rank_energy_statistic,
    scaled_statistic,
)
from .errors import (
    AssignmentError,
    CalibrationUnavailableError,
    DatasetError,
    ExperimentError,
    InvalidMethodError,
    MvrankError,
    OutputError,
    ParameterError,
    PointSetError,
    ScenarioError,
    SchemaError,
)
from .globaltest import GlobalTest
from .harness import ExperimentSpec, RejectionRecord, emit_results, run_experiment, sensitivity_experiment
from .lds import PointSet, SequenceKind
from .methods.base import BaseMethod
from .rankmap import RankAssignment, empirical_ranks

__all__ = [
    "GlobalTest",
    "BaseMethod",
    "errors",
    "TwoSampleData",
    "TestOutcome",
    "EndpointKind",
    "parse_dataset",
    "parse_schema",
    "write_dataset",
    "PointSet",
    "SequenceKind",
    "AssignmentProblem",
    "Assignment",
    "solve_lap",
    "brute_force_lap",
    "RankAssignment",
    "empirical_ranks",
    "rank_energy_statistic",
    "scaled_statistic",
    "CalibrationEntry",
    "CalibrationCache",
    "calibrate_threshold",
    "decide",
    "SurvivalColumn",
    "gehan_pair_score",
    "gehan_scores",
    "test_with_survival",
    "ScoreMap",
    "pair_scores",
    "u_statistic",
    "obrien_test",
    "permutation_test",
    "ScenarioConfig",
    "ExperimentSpec",
    "RejectionRecord",
    "run_experiment",
    "sensitivity_experiment",
    "emit_results",
    "MvrankError",
    "ParameterError",
    "DatasetError",
    "SchemaError",
    "PointSetError",
    "AssignmentError",
    "CalibrationUnavailableError",
    "InvalidMethodError",
    "ScenarioError",
    "ExperimentError",
    "OutputError",
]
