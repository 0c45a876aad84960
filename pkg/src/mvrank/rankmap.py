"""Empirical multivariate ranks of a pooled two-arm sample."""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from mvrank.assign import Assignment, AssignmentProblem, as_columns, solve_lap
from mvrank.errors import AssignmentError
from mvrank.lds import PointSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RankAssignment:
    """Ranks of both arms: rows of ``point_set`` matched one-to-one to observations."""

    ranks_x: np.ndarray
    ranks_y: np.ndarray
    point_set: PointSet
    assignment: Assignment

    @property
    def m(self) -> int:
        return self.ranks_x.shape[0]

    @property
    def n(self) -> int:
        return self.ranks_y.shape[0]


def standardize_columns(pooled: np.ndarray) -> np.ndarray:
    """Centres each column and scales it to unit standard deviation; constant columns are only centred."""
    centred = pooled - pooled.mean(axis=0)
    scale = pooled.std(axis=0)
    scale[scale == 0.0] = 1.0
    return centred / scale


def empirical_ranks(
    arm_x: npt.ArrayLike,
    arm_y: npt.ArrayLike,
    ps: PointSet,
    *,
    standardize: bool = False,
) -> RankAssignment:
    """Pools both arms and assigns each observation its optimal-transport rank in ``ps``.

    ``ps`` must hold exactly m + n points of the same dimension as the data.
    """
    x = as_columns(arm_x)
    y = as_columns(arm_y)
    m = x.shape[0]
    pooled = np.vstack([x, y])
    if pooled.shape != ps.points.shape:
        raise AssignmentError(
            f"The pooled sample has shape {pooled.shape} but the point set has shape {ps.points.shape}"
        )
    if standardize:
        pooled = standardize_columns(pooled)
    assignment = solve_lap(AssignmentProblem(pooled, ps.points))
    ranks = ps.points[assignment.perm]
    return RankAssignment(ranks_x=ranks[:m], ranks_y=ranks[m:], point_set=ps, assignment=assignment)
