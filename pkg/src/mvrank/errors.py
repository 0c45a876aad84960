"""Exception types raised by mvrank.

Hierarchy:

    MvrankError
    ├── ParameterError               (argument out of range; also a ValueError)
    ├── DatasetError                 (ingest / validation, carries row and column)
    │   └── SchemaError              (endpoint schema problems)
    ├── PointSetError                (dimension beyond table bounds, invalid point set)
    ├── AssignmentError              (shape mismatch, non-finite costs)
    ├── CalibrationUnavailableError  (no built-in threshold for the requested (d, alpha))
    ├── InvalidMethodError           (unknown test method or score map)
    ├── ScenarioError                (invalid simulation scenario configuration)
    ├── ExperimentError              (failed simulation replicate, carries cell and replicate)
    └── OutputError                  (a result, dataset or cache file cannot be written, carries path)

Catching `MvrankError` handles everything the library can raise.
"""

from typing import Any


class MvrankError(Exception):
    """Base class for all errors raised by this library."""


class ParameterError(MvrankError, ValueError):
    """An argument lies outside its documented range."""


class DatasetError(MvrankError):
    """A dataset is malformed or violates a TwoSampleData invariant.

    Attributes:
        row: 1-based line number in the source file (header is line 1), if known.
        column: Name of the offending column, if known.
    """

    def __init__(self, message: str, *, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaError(DatasetError):
    """The endpoint schema is invalid or does not match the data."""


class PointSetError(MvrankError):
    """A point set cannot be generated or violates its invariants."""


class AssignmentError(MvrankError):
    """An assignment problem is malformed or cannot be solved."""


class CalibrationUnavailableError(MvrankError):
    """No built-in threshold exists for the requested dimension and level."""


class InvalidMethodError(MvrankError):
    """Error related to the invalid choice of a test method or score map"""


class ScenarioError(MvrankError):
    """A simulation scenario configuration is invalid."""


class ExperimentError(MvrankError):
    """A simulation replicate failed.

    Attributes:
        cell: Description of the grid cell (scenario, r, rho) that failed.
        replicate: Index of the failing replicate within the cell.
    """

    def __init__(self, message: str, *, cell: dict[str, Any] | None = None, replicate: int | None = None):
        super().__init__(message)
        self.cell = cell
        self.replicate = replicate


class OutputError(MvrankError):
    """A file could not be written.

    Attributes:
        path: The file that failed.
    """

    def __init__(self, message: str, *, path: str | None = None):
        super().__init__(message)
        self.path = path


_CONTEXT_ATTRS = ("row", "column", "cell", "replicate", "path")


def error_report(exc: BaseException) -> dict[str, Any]:
    """Builds the machine-readable report for an exception.

    Context attributes (row, column, cell, replicate, path) are included when the
    exception carries them and they are set.
    """
    report: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
    for attr in _CONTEXT_ATTRS:
        value = getattr(exc, attr, None)
        if value is not None:
            report[attr] = value
    return report
