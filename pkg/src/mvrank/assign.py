"""Optimal assignment of pooled observations to rank-target points.

The exact solver is scipy's ``linear_sum_assignment``, a shortest augmenting
path method in the Jonker-Volgenant family. Rows are processed in index order,
so the returned permutation is deterministic even when several assignments
are optimal.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from mvrank.errors import AssignmentError

logger = logging.getLogger(__name__)

MAX_BRUTE_FORCE = 9

Objective = Literal["sqeuclidean", "inner_product"]


def as_columns(values: npt.ArrayLike) -> np.ndarray:
    """Reads a sample as an (N, d) matrix; 1-D input holds N scalar observations."""
    matrix = np.asarray(values, dtype=float)
    return matrix.reshape(-1, 1) if matrix.ndim < 2 else matrix


def cost_matrix(sources: npt.ArrayLike, targets: npt.ArrayLike) -> np.ndarray:
    """Squared Euclidean distances between every source and every target."""
    sources = as_columns(sources)
    targets = as_columns(targets)
    if sources.shape[1] != targets.shape[1]:
        raise AssignmentError(f"Sources have {sources.shape[1]} columns but targets have {targets.shape[1]}")
    return cdist(sources, targets, metric="sqeuclidean")


@dataclass(frozen=True, eq=False)
class AssignmentProblem:
    """N sources matched to N targets under squared Euclidean cost."""

    sources: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        sources = as_columns(self.sources)
        targets = as_columns(self.targets)
        if sources.shape != targets.shape:
            raise AssignmentError(f"Sources {sources.shape} and targets {targets.shape} must have the same shape")
        if sources.shape[0] < 1:
            raise AssignmentError("An assignment problem needs at least one source")
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "targets", targets)

    @property
    def size(self) -> int:
        return self.sources.shape[0]

    def cost(self) -> np.ndarray:
        return cost_matrix(self.sources, self.targets)


@dataclass(frozen=True, eq=False)
class Assignment:
    """``perm[i]`` is the (0-based) target index assigned to source i."""

    perm: np.ndarray
    total_cost: float


ProblemLike = AssignmentProblem | npt.ArrayLike


def _cost_of(problem: ProblemLike) -> np.ndarray:
    if isinstance(problem, AssignmentProblem):
        cost = problem.cost()
    else:
        cost = np.asarray(problem, dtype=float)
        if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.shape[0] < 1:
            raise AssignmentError(f"A cost matrix must be square and non-empty, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise AssignmentError("The cost matrix contains non-finite entries")
    return cost


def assignment_cost(cost: np.ndarray, perm: np.ndarray) -> float:
    """Sum of ``cost[i, perm[i]]`` in row order."""
    return float(cost[np.arange(cost.shape[0]), perm].sum())


def solve_lap(problem: ProblemLike, *, objective: Objective = "sqeuclidean") -> Assignment:
    """Globally optimal assignment.

    ``problem`` is an AssignmentProblem or a precomputed square cost matrix.
    With ``objective="inner_product"`` the permutation maximizes the sum of
    inner products between sources and assigned targets instead; the reported
    ``total_cost`` is always the squared Euclidean cost of the permutation.
    """
    cost = _cost_of(problem)
    if objective == "inner_product":
        if not isinstance(problem, AssignmentProblem):
            raise AssignmentError("The inner-product objective needs sources and targets")
        _, perm = linear_sum_assignment(problem.sources @ problem.targets.T, maximize=True)
    elif objective == "sqeuclidean":
        _, perm = linear_sum_assignment(cost)
    else:
        raise AssignmentError(f"Unknown objective '{objective}'")
    logger.debug("Solved %dx%d assignment (%s)", cost.shape[0], cost.shape[1], objective)
    return Assignment(perm=perm, total_cost=assignment_cost(cost, perm))


def brute_force_lap(problem: ProblemLike) -> Assignment:
    """Exhaustive search over all permutations; returns the lexicographically smallest optimum."""
    cost = _cost_of(problem)
    size = cost.shape[0]
    if size > MAX_BRUTE_FORCE:
        raise AssignmentError(f"Brute force supports N <= {MAX_BRUTE_FORCE}, got {size}")
    best_perm: np.ndarray | None = None
    best_cost = np.inf
    for candidate in itertools.permutations(range(size)):
        perm = np.array(candidate)
        total = assignment_cost(cost, perm)
        if total < best_cost:
            best_perm, best_cost = perm, total
    return Assignment(perm=best_perm, total_cost=best_cost)
