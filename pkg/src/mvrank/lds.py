"""Low-discrepancy and uniform point sets on [0, 1]^d used as rank targets.

Sobol' and Halton points come from the unscrambled ``scipy.stats.qmc``
engines; Sobol' uses the Joe-Kuo direction numbers bundled with scipy.
"""

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from scipy.stats import qmc

from mvrank.errors import ParameterError, PointSetError

logger = logging.getLogger(__name__)

MAX_HALTON_DIM = 64
MAX_HAMMERSLEY_DIM = MAX_HALTON_DIM + 1
MAX_SOBOL_DIM = 21201
SOBOL_DIRECTIONS = "joe-kuo-6.21201"
MAX_DISCREPANCY_CORNERS = 2**18


class SequenceKind(StrEnum):
    SOBOL = "sobol"
    HALTON = "halton"
    HAMMERSLEY = "hammersley"
    UNIFORM = "uniform"


@dataclass(frozen=True, eq=False)
class PointSet:
    """n distinct points in [0, 1]^d with their provenance."""

    points: np.ndarray
    kind: SequenceKind
    seed: int | None = None
    skip: int = 0
    source: str = field(default="")

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise PointSetError(f"A point set needs shape (n, d) with n, d >= 1, got {points.shape}")
        if np.any(points < 0.0) or np.any(points > 1.0):
            raise PointSetError("Point coordinates must lie in [0, 1]")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise PointSetError(f"The {self.kind} point set contains duplicated points")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "kind", SequenceKind(self.kind))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def provenance(self) -> dict[str, object]:
        return {"kind": self.kind.value, "n": self.n, "d": self.d, "seed": self.seed, "skip": self.skip, "source": self.source}


def _check_bounds(n: int, d: int, max_dim: int, kind: str) -> None:
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    if d < 1:
        raise ParameterError(f"d must be at least 1, got {d}")
    if d > max_dim:
        raise PointSetError(f"The {kind} sequence supports at most {max_dim} dimensions, got {d}")


def _radical_inverses(n: int, d: int) -> np.ndarray:
    """Radical inverses of 1..n in the first d prime bases."""
    engine = qmc.Halton(d=d, scramble=False)
    engine.fast_forward(1)
    return engine.random(n)


def halton(n: int, d: int) -> PointSet:
    """Halton points 1..n: coordinate k is the radical inverse in the k-th prime base."""
    _check_bounds(n, d, MAX_HALTON_DIM, "Halton")
    return PointSet(_radical_inverses(n, d), SequenceKind.HALTON, skip=1, source="radical-inverse")


def sobol(n: int, d: int, skip: int = 1) -> PointSet:
    """Sobol' points in Gray-code order, starting at index ``skip``.

    The default skip of 1 drops the origin.
    """
    _check_bounds(n, d, MAX_SOBOL_DIM, "Sobol'")
    if skip < 0:
        raise ParameterError(f"skip must be non-negative, got {skip}")
    engine = qmc.Sobol(d=d, scramble=False)
    if skip:
        engine.fast_forward(skip)
    with warnings.catch_warnings():
        # balance warning for n not a power of two
        warnings.simplefilter("ignore", UserWarning)
        points = engine.random(n)
    return PointSet(points, SequenceKind.SOBOL, skip=skip, source=SOBOL_DIRECTIONS)


def hammersley(n: int, d: int) -> PointSet:
    """Hammersley points: (i - 0.5)/n followed by Halton coordinates in d - 1 bases."""
    _check_bounds(n, d, MAX_HAMMERSLEY_DIM, "Hammersley")
    first = ((np.arange(1, n + 1) - 0.5) / n).reshape(-1, 1)
    if d == 1:
        points = first
    else:
        points = np.hstack([first, _radical_inverses(n, d - 1)])
    return PointSet(points, SequenceKind.HAMMERSLEY, source="midpoint+radical-inverse")


def uniform(n: int, d: int, seed: int) -> PointSet:
    """i.i.d. uniform points, deterministic given ``seed``."""
    _check_bounds(n, d, MAX_SOBOL_DIM, "uniform")
    points = np.random.default_rng(seed).random((n, d))
    return PointSet(points, SequenceKind.UNIFORM, seed=seed, source="numpy-default-rng")


def as_kind(kind: SequenceKind | str) -> SequenceKind:
    try:
        return SequenceKind(kind)
    except ValueError:
        raise ParameterError(f"Unknown sequence kind '{kind}'. Available: {[k.value for k in SequenceKind]}") from None


def generate(kind: SequenceKind | str, n: int, d: int, *, seed: int | None = None, skip: int = 1) -> PointSet:
    """Builds a point set of the given kind; ``seed`` is used by the uniform kind only."""
    kind = as_kind(kind)
    logger.debug("Generating %s point set n=%d d=%d", kind, n, d)
    if kind is SequenceKind.SOBOL:
        return sobol(n, d, skip=skip)
    if kind is SequenceKind.HALTON:
        return halton(n, d)
    if kind is SequenceKind.HAMMERSLEY:
        return hammersley(n, d)
    return uniform(n, d, seed=0 if seed is None else seed)


# ---------------------------------------------------------------------------
# Discrepancy
# ---------------------------------------------------------------------------

def _star_discrepancy_1d(x: np.ndarray) -> float:
    x = np.sort(x)
    n = x.size
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(i / n - x, x - (i - 1) / n)))


def _axis_grid(values: np.ndarray, resolution: int) -> np.ndarray:
    candidates = np.unique(np.append(values, 1.0))
    if candidates.size > resolution:
        idx = np.unique(np.round(np.linspace(0, candidates.size - 1, resolution)).astype(int))
        candidates = candidates[idx]
    return candidates


def star_discrepancy_estimate(
    ps: PointSet, grid_resolution: int = 64, max_corners: int = MAX_DISCREPANCY_CORNERS
) -> float:
    """Lower bound on the star discrepancy of ``ps``.

    Exact in d = 1. For d >= 2 the supremum runs over anchored boxes [0, t)
    and [0, t] whose corners t take at most ``grid_resolution`` values per
    axis, drawn from the point coordinates. The per-axis resolution shrinks
    until the grid has at most ``max_corners`` corners, never below 2.
    """
    if grid_resolution < 2:
        raise ParameterError(f"grid_resolution must be at least 2, got {grid_resolution}")
    pts = ps.points
    if ps.d == 1:
        return _star_discrepancy_1d(pts[:, 0])

    resolution = max(2, min(grid_resolution, int(math.floor(max_corners ** (1.0 / ps.d) + 1e-9))))
    if resolution < grid_resolution:
        logger.debug("Discrepancy grid for d=%d reduced to %d values per axis", ps.d, resolution)
    grids = [_axis_grid(pts[:, k], resolution) for k in range(ps.d)]
    n = ps.n
    best = 0.0
    chunk = max(1, 2_000_000 // (n * ps.d))
    for batch in itertools.batched(itertools.product(*grids), chunk):
        t = np.array(batch)
        volume = np.prod(t, axis=1)
        below = pts[None, :, :] < t[:, None, :]
        open_count = np.all(below, axis=2).sum(axis=1)
        closed_count = np.all(pts[None, :, :] <= t[:, None, :], axis=2).sum(axis=1)
        gap = np.maximum(volume - open_count / n, closed_count / n - volume)
        best = max(best, float(gap.max()))
    return best
