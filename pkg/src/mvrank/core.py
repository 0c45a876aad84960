"""Data model for two-arm multi-endpoint datasets, endpoint schemas and CSV ingest."""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
import pandas as pd

from mvrank.errors import DatasetError, OutputError, ParameterError, SchemaError

logger = logging.getLogger(__name__)

ARM_COLUMN = "arm"
EVENT_SUFFIX = "_event"
ARM_LABELS = ("x", "y")


class EndpointKind(StrEnum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"
    TIME_TO_EVENT = "time-to-event"


SchemaLike = str | Mapping[str, "EndpointKind | str"] | Iterable[tuple[str, "EndpointKind | str"]]


def _kind(value: "EndpointKind | str", name: str) -> EndpointKind:
    try:
        return EndpointKind(str(value).strip().lower())
    except ValueError:
        choices = ", ".join(k.value for k in EndpointKind)
        raise SchemaError(f"Endpoint '{name}' has unknown kind '{value}'. Available: {choices}", column=name) from None


def parse_schema(schema: SchemaLike) -> list[tuple[str, EndpointKind]]:
    """Parses an endpoint schema description.

    Accepts the CLI form ``"os_time:time-to-event,hfmse:continuous"``, a mapping
    from endpoint name to kind, or an iterable of ``(name, kind)`` pairs.
    Order is preserved.
    """
    if isinstance(schema, str):
        pairs: list[tuple[str, str]] = []
        for part in schema.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, kind = part.partition(":")
            if not sep or not name.strip():
                raise SchemaError(f"Schema entry '{part}' is not of the form name:kind")
            pairs.append((name.strip(), kind))
        items: Iterable[tuple[str, Any]] = pairs
    elif isinstance(schema, Mapping):
        items = schema.items()
    else:
        items = schema
    endpoints = [(str(name), _kind(kind, str(name))) for name, kind in items]
    if not endpoints:
        raise SchemaError("The schema declares no endpoint")
    names = [name for name, _ in endpoints]
    duplicated = sorted({n for n in names if names.count(n) > 1})
    if duplicated:
        raise SchemaError(f"Endpoints declared more than once: {duplicated}")
    return endpoints


def _as_events(values: npt.ArrayLike | None, length: int, arm: str) -> np.ndarray | None:
    if values is None:
        return None
    events = np.asarray(values)
    if events.ndim != 1 or events.shape[0] != length:
        raise DatasetError(f"Event indicators of arm {arm} must be a vector of length {length}")
    if events.dtype != bool:
        if not np.all(np.isin(events, (0, 1))):
            raise DatasetError(f"Event indicators of arm {arm} must be 0 or 1")
        events = events.astype(bool)
    return events.copy()


def _as_matrix(values: npt.ArrayLike, arm: str) -> np.ndarray:
    matrix = np.array(values, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    if matrix.ndim != 2:
        raise DatasetError(f"Arm {arm} must be a 2-D matrix, got {matrix.ndim} dimensions")
    if matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise DatasetError(f"Arm {arm} is empty")
    if not np.all(np.isfinite(matrix)):
        row, col = np.argwhere(~np.isfinite(matrix))[0]
        raise DatasetError(f"Arm {arm} has a missing or non-finite value at observation {row + 1}, endpoint {col + 1}")
    return matrix


@dataclass(frozen=True, eq=False)
class TwoSampleData:
    """Two arms of d-endpoint observations.

    A time-to-event endpoint, if any, is moved to index 0 on construction and
    its event indicators (True = event observed) are stored in ``events_x`` and
    ``events_y``. Arrays are read-only after construction.
    """

    arm_x: np.ndarray
    arm_y: np.ndarray
    schema: tuple[EndpointKind, ...]
    names: tuple[str, ...] = ()
    events_x: np.ndarray | None = None
    events_y: np.ndarray | None = None
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        x = _as_matrix(self.arm_x, "x")
        y = _as_matrix(self.arm_y, "y")
        if x.shape[1] != y.shape[1]:
            raise DatasetError(f"Arms have different numbers of endpoints: {x.shape[1]} and {y.shape[1]}")
        d = x.shape[1]
        names = tuple(self.names) if self.names else tuple(f"endpoint{k + 1}" for k in range(d))
        schema = tuple(_kind(kind, name) for kind, name in zip(self.schema, names))
        if len(self.schema) != d or len(names) != d:
            raise SchemaError(f"Schema and names must list {d} endpoints, got {len(self.schema)} and {len(names)}")
        if len(set(names)) != d:
            raise SchemaError(f"Endpoint names must be unique: {names}")

        survival = [k for k, kind in enumerate(schema) if kind is EndpointKind.TIME_TO_EVENT]
        if len(survival) > 1:
            raise SchemaError(
                f"Only one time-to-event endpoint is supported, got {[names[k] for k in survival]}",
                column=names[survival[1]],
            )
        events_x = _as_events(self.events_x, x.shape[0], "x")
        events_y = _as_events(self.events_y, y.shape[0], "y")
        if survival:
            if events_x is None or events_y is None:
                raise SchemaError(
                    f"Time-to-event endpoint '{names[survival[0]]}' requires event indicators for both arms",
                    column=names[survival[0]] + EVENT_SUFFIX,
                )
            k = survival[0]
            if np.any(x[:, k] < 0) or np.any(y[:, k] < 0):
                raise DatasetError(f"Time-to-event endpoint '{names[k]}' has negative times", column=names[k])
            if k != 0:
                order = [k] + [j for j in range(d) if j != k]
                x, y = x[:, order], y[:, order]
                schema = tuple(schema[j] for j in order)
                names = tuple(names[j] for j in order)
        elif events_x is not None or events_y is not None:
            raise SchemaError("Event indicators given but the schema has no time-to-event endpoint")

        for array in (x, y, events_x, events_y):
            if array is not None:
                array.setflags(write=False)
        object.__setattr__(self, "arm_x", x)
        object.__setattr__(self, "arm_y", y)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "events_x", events_x)
        object.__setattr__(self, "events_y", events_y)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def m(self) -> int:
        return self.arm_x.shape[0]

    @property
    def n(self) -> int:
        return self.arm_y.shape[0]

    @property
    def d(self) -> int:
        return self.arm_x.shape[1]

    @property
    def has_survival(self) -> bool:
        return self.schema[0] is EndpointKind.TIME_TO_EVENT

    def pooled(self) -> np.ndarray:
        """Returns the (m+n) x d pooled sample, arm x first."""
        return np.vstack([self.arm_x, self.arm_y])

    def pooled_events(self) -> np.ndarray | None:
        if not self.has_survival:
            return None
        return np.concatenate([self.events_x, self.events_y])

    def swapped(self) -> "TwoSampleData":
        """Returns the same data with the two arms exchanged."""
        return TwoSampleData(
            arm_x=self.arm_y,
            arm_y=self.arm_x,
            schema=self.schema,
            names=self.names,
            events_x=self.events_y,
            events_y=self.events_x,
            meta=self.meta,
        )

    def schema_spec(self) -> str:
        """Returns the schema in the ``name:kind,...`` form accepted by parse_schema."""
        return ",".join(f"{name}:{kind.value}" for name, kind in zip(self.names, self.schema))


@dataclass(frozen=True)
class TestOutcome:
    """Result of one global test.

    For the rank-energy method ``statistic`` is RE^2, ``scaled_statistic`` is
    mn/(m+n) RE^2 and ``reject`` is ``scaled_statistic >= threshold``. For the
    baselines ``statistic`` is the U value, ``threshold`` is alpha and
    ``reject`` is ``p_value < alpha``.
    """

    __test__ = False

    statistic: float
    threshold: float
    reject: bool
    method: str
    alpha: float
    scaled_statistic: float | None = None
    p_value: float | None = None
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ParameterError(f"p_value must lie in [0, 1], got {self.p_value}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "alpha": self.alpha,
            "statistic": self.statistic,
            "scaled_statistic": self.scaled_statistic,
            "threshold": self.threshold,
            "reject": bool(self.reject),
            "p_value": self.p_value,
            "meta": dict(self.meta),
        }


# ---------------------------------------------------------------------------
# CSV ingest / emit
# ---------------------------------------------------------------------------

def _infer_schema(columns: list[str]) -> list[tuple[str, EndpointKind]]:
    endpoints = []
    for column in columns:
        if column == ARM_COLUMN or column.endswith(EVENT_SUFFIX):
            continue
        kind = EndpointKind.TIME_TO_EVENT if column + EVENT_SUFFIX in columns else EndpointKind.CONTINUOUS
        endpoints.append((column, kind))
    if not endpoints:
        raise SchemaError("The file has no endpoint column")
    return endpoints


def _numeric_column(frame: pd.DataFrame, column: str, source: str) -> np.ndarray:
    cells = frame[column].str.strip()
    values = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        cell = cells.iloc[bad[0]]
        reason = "missing value" if cell == "" else f"non-numeric value '{cell}'"
        row = int(bad[0]) + 2
        raise DatasetError(f"{source}, row {row}, column '{column}': {reason}", row=row, column=column)
    return values


def _event_column(frame: pd.DataFrame, column: str, source: str) -> np.ndarray:
    values = _numeric_column(frame, column, source)
    bad = np.flatnonzero(~np.isin(values, (0.0, 1.0)))
    if bad.size:
        row = int(bad[0]) + 2
        raise DatasetError(
            f"{source}, row {row}, column '{column}': event indicator must be 0 or 1, got '{frame[column].iloc[bad[0]]}'",
            row=row,
            column=column,
        )
    return values.astype(bool)


def parse_dataset(path: str | Path, schema: SchemaLike | None = None) -> TwoSampleData:
    """Reads a two-arm CSV dataset.

    The file needs a header row, an ``arm`` column with values ``x``/``y``, one
    column per endpoint and an ``<name>_event`` column (0/1) for the
    time-to-event endpoint. Without a schema every endpoint column is
    continuous, except those with a matching ``_event`` column.

    Raises:
        DatasetError: Missing columns, non-numeric or missing cells, invalid
            arm labels or an empty arm, with the offending row and column.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"Dataset file '{path}' does not exist")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DatasetError(f"Cannot read '{path}' as CSV: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    source = path.name

    if ARM_COLUMN not in frame.columns:
        raise DatasetError(f"{source}: missing '{ARM_COLUMN}' column", column=ARM_COLUMN)
    endpoints = parse_schema(schema) if schema is not None else _infer_schema(list(frame.columns))
    for name, kind in endpoints:
        if name not in frame.columns:
            raise DatasetError(f"{source}: missing endpoint column '{name}'", column=name)
        if kind is EndpointKind.TIME_TO_EVENT and name + EVENT_SUFFIX not in frame.columns:
            raise SchemaError(
                f"{source}: time-to-event endpoint '{name}' needs an event column '{name}{EVENT_SUFFIX}'",
                column=name + EVENT_SUFFIX,
            )

    arms = frame[ARM_COLUMN].str.strip()
    bad = np.flatnonzero(~arms.isin(ARM_LABELS).to_numpy())
    if bad.size:
        row = int(bad[0]) + 2
        raise DatasetError(
            f"{source}, row {row}, column '{ARM_COLUMN}': arm must be one of {ARM_LABELS}, got '{arms.iloc[bad[0]]}'",
            row=row,
            column=ARM_COLUMN,
        )
    is_x = (arms == "x").to_numpy()
    for label, mask in (("x", is_x), ("y", ~is_x)):
        if not mask.any():
            raise DatasetError(f"{source}: arm '{label}' has no observations", column=ARM_COLUMN)

    matrix = np.column_stack([_numeric_column(frame, name, source) for name, _ in endpoints])
    events = None
    for name, kind in endpoints:
        if kind is EndpointKind.TIME_TO_EVENT:
            events = _event_column(frame, name + EVENT_SUFFIX, source)

    for k, (name, kind) in enumerate(endpoints):
        if kind is EndpointKind.CONTINUOUS and np.unique(matrix[:, k]).size < matrix.shape[0]:
            logger.warning("Continuous endpoint '%s' has tied values; ranks follow the solver's tie-breaking", name)

    data = TwoSampleData(
        arm_x=matrix[is_x],
        arm_y=matrix[~is_x],
        schema=tuple(kind for _, kind in endpoints),
        names=tuple(name for name, _ in endpoints),
        events_x=None if events is None else events[is_x],
        events_y=None if events is None else events[~is_x],
    )
    logger.debug("Parsed %s: m=%d n=%d endpoints=%s", source, data.m, data.n, data.names)
    return data


def write_dataset(data: TwoSampleData, path: str | Path) -> Path:
    """Writes ``data`` in the format read by parse_dataset.

    Floats are written in shortest round-trip form, so re-parsing with
    ``data.schema_spec()`` reproduces the matrices exactly.
    """
    path = Path(path)
    frame = pd.DataFrame(data.pooled(), columns=list(data.names))
    frame.insert(0, ARM_COLUMN, ["x"] * data.m + ["y"] * data.n)
    if data.has_survival:
        frame.insert(2, data.names[0] + EVENT_SUFFIX, data.pooled_events().astype(int))
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise OutputError(f"Cannot write dataset '{path}': {e}", path=str(path)) from e
    return path
