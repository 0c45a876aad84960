"""Rank energy statistic, Monte Carlo threshold calibration and the accept/reject decision."""

import json
import logging
import math
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import cdist

from mvrank import lds
from mvrank._parallel import parallel_map, split_range
from mvrank._streams import derive_seed, substream
from mvrank.assign import as_columns
from mvrank.core import TestOutcome, TwoSampleData
from mvrank.errors import CalibrationUnavailableError, OutputError, ParameterError, SchemaError
from mvrank.lds import PointSet, SequenceKind
from mvrank.rankmap import RankAssignment, empirical_ranks

logger = logging.getLogger(__name__)

METHOD_NAME = "rank-energy"
DEFAULT_RUNS = 10_000
DEFAULT_CACHE_PATH = Path("calib_cache.json")

# Thresholds for mn/(m+n) RE^2 at d = 1..6, estimated by Monte Carlo under H0.
TABLE_THRESHOLDS: dict[float, tuple[float, ...]] = {
    0.05: (0.94, 1.12, 1.26, 1.37, 1.45, 1.54),
    0.10: (0.70, 0.92, 1.07, 1.17, 1.28, 1.37),
}


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")


# ---------------------------------------------------------------------------
# Statistic
# ---------------------------------------------------------------------------

def rank_energy_statistic(ra: RankAssignment) -> float:
    """Energy distance V-statistic between the two rank clouds (Euclidean, not squared)."""
    rx, ry = ra.ranks_x, ra.ranks_y
    m, n = rx.shape[0], ry.shape[0]
    cross = 2.0 * cdist(rx, ry).sum() / (m * n)
    within_x = cdist(rx, rx).sum() / m**2
    within_y = cdist(ry, ry).sum() / n**2
    return float(cross - within_x - within_y)


def scaled_statistic(re2: float, m: int, n: int) -> float:
    """mn/(m+n) RE^2, the quantity compared against the threshold."""
    if re2 < 0:
        raise ParameterError(f"The rank energy statistic must be non-negative, got {re2}")
    return m * n / (m + n) * re2


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationEntry:
    m: int
    n: int
    d: int
    alpha: float
    runs: int
    kind: SequenceKind
    seed: int
    threshold: float

    def key(self) -> str:
        return calibration_key(self.m, self.n, self.d, self.alpha, self.runs, self.kind, self.seed)

    def to_dict(self) -> dict[str, Any]:
        record = asdict(self)
        record["kind"] = SequenceKind(self.kind).value
        return record

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> "CalibrationEntry":
        return cls(
            m=int(record["m"]),
            n=int(record["n"]),
            d=int(record["d"]),
            alpha=float(record["alpha"]),
            runs=int(record["runs"]),
            kind=SequenceKind(record["kind"]),
            seed=int(record["seed"]),
            threshold=float(record["threshold"]),
        )


def calibration_key(m: int, n: int, d: int, alpha: float, runs: int, kind: SequenceKind | str, seed: int) -> str:
    return f"m={m}|n={n}|d={d}|alpha={alpha!r}|runs={runs}|kind={SequenceKind(kind).value}|seed={seed}"


class CalibrationCache:
    """CalibrationEntry store persisted as JSON; ``path=None`` keeps it in memory only."""

    def __init__(self, path: str | Path | None = DEFAULT_CACHE_PATH):
        self.path = None if path is None else Path(path)
        self._entries: dict[str, CalibrationEntry] = self._load()

    def _load(self) -> dict[str, CalibrationEntry]:
        if self.path is None or not self.path.exists():
            return {}
        try:
            records = json.loads(self.path.read_text(encoding="utf-8"))
            return {key: CalibrationEntry.from_dict(value) for key, value in records.items()}
        except (ValueError, KeyError, TypeError, AttributeError) as e:
            raise ParameterError(f"Calibration cache '{self.path}' is not a valid cache file: {e}") from e

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, m: int, n: int, d: int, alpha: float, runs: int, kind: SequenceKind | str, seed: int) -> CalibrationEntry | None:
        return self._entries.get(calibration_key(m, n, d, alpha, runs, kind, seed))

    def put(self, entry: CalibrationEntry) -> None:
        self._entries[entry.key()] = entry
        self.save()

    def save(self) -> None:
        if self.path is None:
            return
        payload = json.dumps({k: e.to_dict() for k, e in sorted(self._entries.items())}, indent=2, sort_keys=True)
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".calib", suffix=".json")
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload + "\n")
            os.replace(tmp, self.path)
        except OSError as e:
            raise OutputError(f"Cannot save calibration cache '{self.path}': {e}", path=str(self.path)) from e


def _null_chunk(task: tuple[int, int, int, SequenceKind, int, range, PointSet | None]) -> list[float]:
    m, n, d, kind, seed, indices, ps = task
    values = []
    for index in indices:
        rng = substream(seed, index)
        pooled = rng.standard_normal((m + n, d))
        points = ps if ps is not None else lds.uniform(m + n, d, seed=int(rng.integers(2**63)))
        ra = empirical_ranks(pooled[:m], pooled[m:], points)
        values.append(scaled_statistic(rank_energy_statistic(ra), m, n))
    return values


def null_statistics(
    m: int,
    n: int,
    d: int,
    runs: int,
    kind: SequenceKind | str = SequenceKind.SOBOL,
    seed: int = 0,
    *,
    workers: int = 1,
) -> np.ndarray:
    """Scaled statistics of ``runs`` replicates with both arms standard d-variate normal.

    Replicate i draws from the substream (seed, i), so the result does not
    depend on ``workers``.
    """
    kind = SequenceKind(kind)
    ps = None if kind is SequenceKind.UNIFORM else lds.generate(kind, m + n, d)
    tasks = [(m, n, d, kind, seed, chunk, ps) for chunk in split_range(runs, max(1, workers) * 4)]
    chunks = parallel_map(_null_chunk, tasks, workers)
    return np.array([value for chunk in chunks for value in chunk])


def empirical_quantile(values: npt.ArrayLike, level: float) -> float:
    """Order statistic at 1-based index ceil(level * len(values))."""
    ordered = np.sort(np.asarray(values, dtype=float))
    k = math.ceil(round(level * ordered.size, 9))
    return float(ordered[min(max(k, 1), ordered.size) - 1])


def calibrate_threshold(
    m: int,
    n: int,
    d: int,
    alpha: float = 0.05,
    runs: int = DEFAULT_RUNS,
    kind: SequenceKind | str = SequenceKind.SOBOL,
    seed: int = 0,
    *,
    workers: int = 1,
    cache: CalibrationCache | None = None,
) -> CalibrationEntry:
    """Estimates the level-alpha threshold c_{m,n} by simulation under H0.

    Raises:
        ParameterError: runs < 100, alpha outside (0, 1) or a non-positive size.
    """
    _check_alpha(alpha)
    if runs < 100:
        raise ParameterError(f"Calibration needs at least 100 runs, got {runs}")
    if min(m, n, d) < 1:
        raise ParameterError(f"m, n and d must be positive, got m={m} n={n} d={d}")
    kind = SequenceKind(kind)
    if cache is not None:
        hit = cache.get(m, n, d, alpha, runs, kind, seed)
        if hit is not None:
            logger.info("Calibration cache hit for %s", hit.key())
            return hit
    logger.info("Calibrating m=%d n=%d d=%d alpha=%s with %d %s runs", m, n, d, alpha, runs, kind)
    stats = null_statistics(m, n, d, runs, kind, seed, workers=workers)
    entry = CalibrationEntry(
        m=m, n=n, d=d, alpha=alpha, runs=runs, kind=kind, seed=seed,
        threshold=empirical_quantile(stats, 1.0 - alpha),
    )
    logger.info("Calibrated threshold %.4f", entry.threshold)
    if cache is not None:
        cache.put(entry)
    return entry


def calibration_seed(*keys: int | float | str) -> int:
    """Derives a calibration seed from arbitrary keys."""
    return derive_seed("calibration", *keys)


# ---------------------------------------------------------------------------
# Decision
# ---------------------------------------------------------------------------

Calibration = CalibrationEntry | Literal["table"]


def table_threshold(d: int, alpha: float) -> float:
    """Built-in threshold for d <= 6 and alpha in {0.05, 0.10}."""
    for level, values in TABLE_THRESHOLDS.items():
        if math.isclose(alpha, level) and 1 <= d <= len(values):
            return values[d - 1]
    raise CalibrationUnavailableError(
        f"No built-in threshold for d={d}, alpha={alpha} (the table covers d <= 6 and alpha in "
        f"{{0.05, 0.10}}); run a fresh calibration with calibrate_threshold or 'mvrank calibrate'"
    )


def resolve_threshold(
    calibration: Calibration | None,
    m: int,
    n: int,
    d: int,
    alpha: float,
    kind: SequenceKind | str = SequenceKind.SOBOL,
) -> tuple[float, dict[str, Any]]:
    """Returns the threshold to use and its provenance.

    A calibration must match the test's d, alpha and point-set kind; an
    (m, n) mismatch is only logged.
    """
    if calibration is None or calibration == "table":
        return table_threshold(d, alpha), {"threshold_source": "table"}
    if not isinstance(calibration, CalibrationEntry):
        raise ParameterError(f"calibration must be a CalibrationEntry or 'table', got {calibration!r}")
    if calibration.d != d or not math.isclose(calibration.alpha, alpha):
        raise ParameterError(
            f"Calibration for d={calibration.d}, alpha={calibration.alpha} cannot be used with d={d}, alpha={alpha}"
        )
    if SequenceKind(calibration.kind) is not lds.as_kind(kind):
        raise ParameterError(
            f"Calibration computed with {SequenceKind(calibration.kind)} points cannot be used "
            f"with {SequenceKind(kind)} points"
        )
    if (calibration.m, calibration.n) != (m, n):
        logger.warning(
            "Calibration computed for m=%d n=%d applied to m=%d n=%d", calibration.m, calibration.n, m, n
        )
    return calibration.threshold, {"threshold_source": "calibration", "calibration": calibration.to_dict()}


def rank_energy_outcome(
    arm_x: npt.ArrayLike,
    arm_y: npt.ArrayLike,
    *,
    alpha: float = 0.05,
    kind: SequenceKind | str = SequenceKind.SOBOL,
    calibration: Calibration | None = "table",
    standardize: bool = False,
    seed: int | None = None,
    meta: dict[str, Any] | None = None,
) -> TestOutcome:
    """Runs the rank energy test on numeric arms (survival columns already scored)."""
    _check_alpha(alpha)
    x = as_columns(arm_x)
    y = as_columns(arm_y)
    m, n, d = x.shape[0], y.shape[0], x.shape[1]
    kind = lds.as_kind(kind)
    threshold, provenance = resolve_threshold(calibration, m, n, d, alpha, kind)
    ps = lds.generate(kind, m + n, d, seed=seed)
    ra = empirical_ranks(x, y, ps, standardize=standardize)
    re2 = rank_energy_statistic(ra)
    scaled = scaled_statistic(re2, m, n)
    return TestOutcome(
        statistic=re2,
        scaled_statistic=scaled,
        threshold=threshold,
        reject=bool(scaled >= threshold),
        method=METHOD_NAME,
        alpha=alpha,
        meta={**provenance, "point_set": ps.provenance(), "standardize": standardize, **(meta or {})},
    )


def decide(
    data: TwoSampleData,
    alpha: float = 0.05,
    kind: SequenceKind | str = SequenceKind.SOBOL,
    calibration: Calibration | None = "table",
    *,
    standardize: bool = False,
    seed: int | None = None,
) -> TestOutcome:
    """Rank energy test of H0: both arms share one distribution.

    Rejects iff mn/(m+n) RE^2 >= threshold. ``calibration`` is a
    CalibrationEntry or ``"table"`` for the built-in thresholds. ``seed`` is
    used by the uniform point-set kind only.

    Raises:
        SchemaError: The data carry a time-to-event endpoint (use
            censored.test_with_survival).
        CalibrationUnavailableError: Table lookup for d > 6 or another alpha.
    """
    if data.has_survival:
        raise SchemaError(
            f"Endpoint '{data.names[0]}' is time-to-event; use censored.test_with_survival",
            column=data.names[0],
        )
    return rank_energy_outcome(
        data.arm_x, data.arm_y, alpha=alpha, kind=kind, calibration=calibration, standardize=standardize, seed=seed
    )
