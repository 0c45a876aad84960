"""Monte Carlo rejection-rate experiments over scenario grids, and their persistence."""

import dataclasses
import json
import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd

from mvrank import datagen
from mvrank._parallel import parallel_map, split_range
from mvrank._streams import derive_seed, substream
from mvrank.energytest import DEFAULT_RUNS, METHOD_NAME, CalibrationCache, CalibrationEntry, calibrate_threshold, calibration_seed
from mvrank.errors import ExperimentError, MvrankError, OutputError, ParameterError
from mvrank.globaltest import GlobalTest
from mvrank.lds import SequenceKind

logger = logging.getLogger(__name__)

NO_SEQUENCE = "none"
RESULT_COLUMNS = ["scenario", "method", "sequence", "r", "rho", "m", "n", "replications", "rejections", "rate"]
SORT_COLUMNS = ["scenario", "method", "sequence", "rho", "r"]


@dataclass(frozen=True)
class ExperimentSpec:
    """Grid of simulated trials: every (r, rho) cell is replicated and tested with every method.

    ``r_values=None`` selects the scenario's default grid. Point-set kinds only
    apply to the rank-energy method. ``plugins`` lists Python files whose
    BaseMethod subclasses are registered before ``methods`` is checked.
    """

    scenario: int
    r_values: tuple[float, ...] | None = None
    rho_values: tuple[float, ...] = (0.3,)
    methods: tuple[str, ...] = (METHOD_NAME,)
    sequence_kinds: tuple[SequenceKind, ...] = (SequenceKind.SOBOL,)
    replications: int = 1000
    alpha: float = 0.05
    m: int = 50
    n: int = 50
    master_seed: int = 0
    permutations: int = 2000
    calibration_runs: int = DEFAULT_RUNS
    standardize: bool = False
    output: str | None = None
    plugins: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.scenario not in datagen.SCENARIOS:
            raise ParameterError(f"scenario must be one of {datagen.SCENARIOS}, got {self.scenario}")
        plugins = tuple(str(p) for p in self.plugins)
        for path in plugins:
            GlobalTest.add_method(path)
        r_values = datagen.default_r_grid(self.scenario) if self.r_values is None else tuple(float(r) for r in self.r_values)
        if not r_values:
            raise ParameterError("r_values must not be empty")
        if not self.rho_values:
            raise ParameterError("rho_values must not be empty")
        methods = tuple(str(m).lower() for m in self.methods)
        if not methods:
            raise ParameterError("methods must not be empty")
        unknown = [m for m in methods if m not in GlobalTest.get_methods()]
        if unknown:
            raise ParameterError(f"Unknown methods {unknown}. Available: {GlobalTest.get_methods()}")
        if self.scenario == 3:
            uncensored = [m for m in methods if not GlobalTest(m).handles_survival()]
            if uncensored:
                raise ParameterError(f"Scenario 3 has a censored endpoint; methods {uncensored} cannot handle it")
        try:
            kinds = tuple(SequenceKind(k) for k in self.sequence_kinds)
        except ValueError as e:
            raise ParameterError(f"Invalid sequence kind: {e}") from None
        if not kinds:
            raise ParameterError("sequence_kinds must not be empty")
        if self.replications < 1:
            raise ParameterError(f"replications must be at least 1, got {self.replications}")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "r_values", r_values)
        object.__setattr__(self, "rho_values", tuple(float(p) for p in self.rho_values))
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "sequence_kinds", kinds)
        object.__setattr__(self, "plugins", plugins)

    @property
    def d(self) -> int:
        return datagen.SCENARIO_DIMENSION[self.scenario]

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> "ExperimentSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(record) - known)
        if unknown:
            raise ParameterError(f"Unknown experiment spec keys: {unknown}")
        if "scenario" not in record:
            raise ParameterError("Experiment spec needs a 'scenario'")
        values = dict(record)
        for key in ("r_values", "rho_values", "methods", "sequence_kinds", "plugins"):
            if values.get(key) is not None:
                values[key] = tuple(values[key])
        return cls(**values)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentSpec":
        try:
            record = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise ParameterError(f"Cannot read experiment spec '{path}': {e}") from e
        if not isinstance(record, dict):
            raise ParameterError(f"Experiment spec '{path}' must be a JSON object")
        return cls.from_dict(record)

    def to_dict(self) -> dict[str, Any]:
        record = dataclasses.asdict(self)
        for key in ("r_values", "rho_values", "methods", "plugins"):
            record[key] = list(record[key])
        record["sequence_kinds"] = [k.value for k in self.sequence_kinds]
        return record


@dataclass(frozen=True)
class RejectionRecord:
    scenario: int
    method: str
    sequence: str
    r: float
    rho: float
    m: int
    n: int
    replications: int
    rejections: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def rate(self) -> float:
        return self.rejections / self.replications

    def to_dict(self) -> dict[str, Any]:
        return {**{k: getattr(self, k) for k in RESULT_COLUMNS}, "wall_time": self.wall_time}


# ---------------------------------------------------------------------------
# Replicates
# ---------------------------------------------------------------------------

def _arms(spec: ExperimentSpec) -> list[tuple[str, str]]:
    """(method, sequence) pairs tested on every replicate."""
    arms = []
    for method in spec.methods:
        if method == METHOD_NAME:
            arms.extend((method, kind.value) for kind in spec.sequence_kinds)
        else:
            arms.append((method, NO_SEQUENCE))
    return arms


def _build_tests(spec: ExperimentSpec, calibrations: dict[str, CalibrationEntry]) -> dict[tuple[str, str], GlobalTest]:
    tests = {}
    for method, sequence in _arms(spec):
        if method == METHOD_NAME:
            options = {"kind": sequence, "calibration": calibrations[sequence], "standardize": spec.standardize}
        else:
            options = {"permutations": spec.permutations}
        tests[(method, sequence)] = GlobalTest(method, spec.alpha, **options)
    return tests


def _run_chunk(task: tuple[ExperimentSpec, dict[str, CalibrationEntry], float, float, range]) -> dict[tuple[str, str], tuple[int, float]]:
    spec, calibrations, r, rho, replicates = task
    # spawned workers start with the built-in registry only
    if any(method not in GlobalTest.get_methods() for method in spec.methods):
        for path in spec.plugins:
            GlobalTest.add_method(path)
    tests = _build_tests(spec, calibrations)
    tally: dict[tuple[str, str], list[float]] = {arm: [0, 0.0] for arm in tests}
    for rep in replicates:
        cell = {"scenario": spec.scenario, "r": r, "rho": rho}
        try:
            cfg = datagen.ScenarioConfig(spec.scenario, m=spec.m, n=spec.n, r=r, rho=rho, seed=spec.master_seed)
            data = datagen.generate(cfg, rng=substream(spec.master_seed, "data", spec.scenario, r, rho, rep))
            for (method, sequence), test in tests.items():
                started = time.perf_counter()
                seed = derive_seed(spec.master_seed, "method", spec.scenario, method, sequence, r, rho, rep)
                outcome = test.run(data, seed=seed)
                tally[(method, sequence)][0] += int(outcome.reject)
                tally[(method, sequence)][1] += time.perf_counter() - started
        except MvrankError as e:
            raise ExperimentError(f"Replicate {rep} of cell {cell} failed: {e}", cell=cell, replicate=rep) from e
        except (ValueError, ArithmeticError) as e:
            raise ExperimentError(f"Replicate {rep} of cell {cell} failed: {e!r}", cell=cell, replicate=rep) from e
    return {arm: (int(count), seconds) for arm, (count, seconds) in tally.items()}


def _calibrate(spec: ExperimentSpec, *, workers: int, cache: CalibrationCache | None) -> dict[str, CalibrationEntry]:
    if METHOD_NAME not in spec.methods:
        return {}
    return {
        kind.value: calibrate_threshold(
            spec.m,
            spec.n,
            spec.d,
            spec.alpha,
            spec.calibration_runs,
            kind,
            calibration_seed(spec.master_seed, spec.m, spec.n, spec.d, spec.alpha, kind.value),
            workers=workers,
            cache=cache,
        )
        for kind in spec.sequence_kinds
    }


def run_experiment(spec: ExperimentSpec, *, workers: int = 1, cache: CalibrationCache | None = None) -> list[RejectionRecord]:
    """Runs every grid cell of ``spec`` and tallies rejections per (method, sequence kind).

    Each replicate draws its data from a substream keyed by (master_seed,
    scenario, r, rho, replicate), shared by all methods, so the records do not
    depend on ``workers`` or on scheduling.

    Raises:
        ExperimentError: A replicate failed; carries the cell and replicate index.
    """
    calibrations = _calibrate(spec, workers=workers, cache=cache)
    cells = [(r, rho) for rho in spec.rho_values for r in spec.r_values]
    parts = max(1, workers) * 2
    tasks = [
        (spec, calibrations, r, rho, chunk)
        for r, rho in cells
        for chunk in split_range(spec.replications, parts)
    ]
    logger.info(
        "Scenario %d: %d cells x %d replicates, methods %s", spec.scenario, len(cells), spec.replications, list(spec.methods)
    )
    results = parallel_map(_run_chunk, tasks, workers)

    totals: dict[tuple[float, float, str, str], list[float]] = defaultdict(lambda: [0, 0.0])
    for (_, _, r, rho, _), chunk in zip(tasks, results):
        for (method, sequence), (count, seconds) in chunk.items():
            totals[(r, rho, method, sequence)][0] += count
            totals[(r, rho, method, sequence)][1] += seconds

    records = []
    for r, rho in cells:
        for method, sequence in _arms(spec):
            count, seconds = totals[(r, rho, method, sequence)]
            record = RejectionRecord(
                scenario=spec.scenario,
                method=method,
                sequence=sequence,
                r=r,
                rho=rho,
                m=spec.m,
                n=spec.n,
                replications=spec.replications,
                rejections=int(count),
                wall_time=seconds,
            )
            logger.info("r=%s rho=%s %s/%s: rate %.3f", r, rho, method, sequence, record.rate)
            records.append(record)
    return records


def sensitivity_experiment(spec: ExperimentSpec, *, workers: int = 1, cache: CalibrationCache | None = None) -> list[RejectionRecord]:
    """Rank-energy rejection curves in scenario 1 at rho = 0.8, one per point-set kind."""
    if spec.scenario != 1:
        logger.warning("Sensitivity study runs scenario 1; ignoring scenario %d", spec.scenario)
    restricted = dataclasses.replace(
        spec,
        scenario=1,
        r_values=spec.r_values if spec.scenario == 1 else None,
        rho_values=(0.8,),
        methods=(METHOD_NAME,),
        sequence_kinds=tuple(SequenceKind),
    )
    return run_experiment(restricted, workers=workers, cache=cache)


def emit_results(records: list[RejectionRecord], path: str | Path, spec: ExperimentSpec | None = None) -> Path:
    """Writes one CSV row per record and a companion JSON with the spec and timings.

    Rows are sorted by (scenario, method, sequence, rho, r). Timings stay out
    of the CSV so identical records give a byte-identical file.
    """
    if not records:
        raise ParameterError("No records to emit")
    path = Path(path)
    frame = pd.DataFrame([record.to_dict() for record in records])
    frame = frame.sort_values(SORT_COLUMNS, kind="mergesort").reset_index(drop=True)
    companion = {
        "spec": None if spec is None else spec.to_dict(),
        "results": path.name,
        "wall_time": frame[SORT_COLUMNS + ["wall_time"]].to_dict(orient="records"),
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame[RESULT_COLUMNS].to_csv(path, index=False, lineterminator="\n")
        path.with_suffix(".json").write_text(json.dumps(companion, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Cannot write results '{path}': {e}", path=str(path)) from e
    logger.info("Wrote %d records to %s", len(records), path)
    return path
