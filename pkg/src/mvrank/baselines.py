"""Comparator global tests built on pairwise per-endpoint rank scores.

All of them reduce the vector of cross-arm comparisons r_ij to a scalar score
phi(r_ij) and average it over pairs (the two-sample U-statistic). O'Brien's
procedure sums per-endpoint midranks and applies a Wilcoxon rank-sum test;
Wittkowski's and the Finkelstein-Schoenfeld scores are tested by permuting
arm labels.
"""

import itertools
import logging
import math
from collections.abc import Sequence
from enum import StrEnum

import numpy as np
import numpy.typing as npt
from scipy.stats import mannwhitneyu, rankdata

from mvrank._streams import substream
from mvrank.censored import gehan_pair_score, gehan_score_matrix, substitute_scores
from mvrank.core import TestOutcome, TwoSampleData
from mvrank.errors import DatasetError, InvalidMethodError, ParameterError

logger = logging.getLogger(__name__)

DEFAULT_PERMUTATIONS = 2000
MAX_EXACT_SPLITS = 1_000_000

# One entry in {-1, 0, +1} per endpoint.
PairScoreVector = npt.NDArray[np.int8]


class ScoreMap(StrEnum):
    OBRIEN_SUM = "obrien_sum"
    WITTKOWSKI_ALL = "wittkowski_all"
    WITTKOWSKI_MAJORITY = "wittkowski_majority"
    FINKELSTEIN_SCHOENFELD = "finkelstein_schoenfeld"


def _score_map(phi: ScoreMap | str) -> ScoreMap:
    try:
        return ScoreMap(phi)
    except ValueError:
        raise InvalidMethodError(f"'{phi}' is not a valid score map. Available: {[p.value for p in ScoreMap]}") from None


def _weights(weights: Sequence[float] | None, d: int) -> np.ndarray:
    if weights is None:
        return np.ones(d)
    w = np.asarray(weights, dtype=float)
    if w.shape != (d,) or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ParameterError(f"weights must be {d} non-negative numbers, got {list(weights)}")
    return w


# ---------------------------------------------------------------------------
# Pair scores and score maps
# ---------------------------------------------------------------------------

def pair_scores(
    x_i: npt.ArrayLike,
    y_j: npt.ArrayLike,
    survival: tuple[bool, bool] | None = None,
) -> PairScoreVector:
    """Per-endpoint comparison 1(x > y) - 1(x < y).

    ``survival`` holds the event indicators of x_i and y_j; when given,
    endpoint 0 is compared with gehan_pair_score.
    """
    x = np.atleast_1d(np.asarray(x_i, dtype=float))
    y = np.atleast_1d(np.asarray(y_j, dtype=float))
    if x.shape != y.shape:
        raise DatasetError(f"Subjects have {x.size} and {y.size} endpoints")
    r = ((x > y).astype(np.int8) - (x < y).astype(np.int8)).astype(np.int8)
    if survival is not None:
        r[0] = gehan_pair_score(x[0], survival[0], y[0], survival[1])
    return r


def _pair_tensor(a: np.ndarray, b: np.ndarray, events_a: np.ndarray | None, events_b: np.ndarray | None) -> np.ndarray:
    """Pair scores of every row of ``a`` against every row of ``b``, shape (len(a), len(b), d)."""
    diff_a, diff_b = a[:, None, :], b[None, :, :]
    r = (diff_a > diff_b).astype(np.int8) - (diff_a < diff_b).astype(np.int8)
    if events_a is not None:
        times = np.concatenate([a[:, 0], b[:, 0]])
        events = np.concatenate([events_a, events_b])
        scores = gehan_score_matrix(times, events)
        r[:, :, 0] = scores[: a.shape[0], a.shape[0]:]
    return r


def cross_pair_scores(data: TwoSampleData) -> np.ndarray:
    """r_ij for every x_i, y_j: shape (m, n, d)."""
    return _pair_tensor(data.arm_x, data.arm_y, data.events_x, data.events_y)


def pooled_pair_scores(data: TwoSampleData) -> np.ndarray:
    """Pair scores between every two pooled subjects: shape (m+n, m+n, d)."""
    pooled = data.pooled()
    left, right = pooled[:, None, :], pooled[None, :, :]
    r = (left > right).astype(np.int8) - (left < right).astype(np.int8)
    if data.has_survival:
        r[:, :, 0] = gehan_score_matrix(pooled[:, 0], data.pooled_events())
    return r


def apply_score_map(r: np.ndarray, phi: ScoreMap | str, weights: Sequence[float] | None = None) -> np.ndarray:
    """phi applied along the last axis of a pair-score array."""
    phi = _score_map(phi)
    r = np.asarray(r)
    if phi is ScoreMap.OBRIEN_SUM:
        return r @ _weights(weights, r.shape[-1])
    if phi is ScoreMap.WITTKOWSKI_ALL:
        return (r.max(axis=-1) > 0).astype(float) - (r.min(axis=-1) < 0).astype(float)
    if phi is ScoreMap.WITTKOWSKI_MAJORITY:
        return np.sign(r.sum(axis=-1, dtype=np.int64)).astype(float)
    # first non-zero comparison in endpoint order decides
    first = np.argmax(r != 0, axis=-1)[..., None]
    return np.take_along_axis(r, first, axis=-1)[..., 0].astype(float)


def u_statistic(data: TwoSampleData, phi: ScoreMap | str, weights: Sequence[float] | None = None) -> float:
    """U = (1/mn) sum over cross-arm pairs of phi(r_ij)."""
    return float(apply_score_map(cross_pair_scores(data), phi, weights).mean())


# ---------------------------------------------------------------------------
# O'Brien rank-sum
# ---------------------------------------------------------------------------

def obrien_summed_ranks(data: TwoSampleData, weights: Sequence[float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-subject (weighted) sums of pooled per-endpoint midranks.

    A time-to-event endpoint is ranked through its pooled Gehan scores.
    """
    if data.has_survival:
        x, y = substitute_scores(data)
        pooled = np.vstack([x, y])
    else:
        pooled = data.pooled()
    summed = rankdata(pooled, axis=0) @ _weights(weights, data.d)
    return summed[: data.m], summed[data.m:]


def obrien_test(data: TwoSampleData, alpha: float = 0.05, weights: Sequence[float] | None = None) -> TestOutcome:
    """Two-sided Wilcoxon rank-sum test (normal approximation, tie-corrected) on summed ranks."""
    sx, sy = obrien_summed_ranks(data, weights)
    if np.all(np.concatenate([sx, sy]) == sx[0]):
        statistic, p_value = data.m * data.n / 2.0, 1.0
    else:
        result = mannwhitneyu(sx, sy, alternative="two-sided", method="asymptotic")
        statistic, p_value = float(result.statistic), float(result.pvalue)
    return TestOutcome(
        statistic=statistic,
        threshold=alpha,
        reject=bool(p_value < alpha),
        method="obrien",
        alpha=alpha,
        p_value=min(max(p_value, 0.0), 1.0),
        meta={"inference": "wilcoxon-rank-sum-normal", "weights": _weights(weights, data.d).tolist()},
    )


# ---------------------------------------------------------------------------
# Permutation inference
# ---------------------------------------------------------------------------

def _split_statistics(phi_matrix: np.ndarray, masks: np.ndarray, m: int, n: int) -> np.ndarray:
    """U for every arm-label split; ``masks`` has one row per split, True marking arm x."""
    s = masks.astype(float)
    return np.einsum("bi,ij,bj->b", s, phi_matrix, 1.0 - s) / (m * n)


def permutation_test(
    data: TwoSampleData,
    phi: ScoreMap | str,
    alpha: float = 0.05,
    B: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
    *,
    exact: bool = False,
    weights: Sequence[float] | None = None,
    method: str | None = None,
) -> TestOutcome:
    """Two-sided permutation test of the U-statistic for score map ``phi``.

    Sampled: p = (1 + #{b: |U_b| >= |U_obs|}) / (B + 1). Exact: the share of
    all C(m+n, m) label splits, the observed one included, with
    |U_b| >= |U_obs|.
    """
    phi = _score_map(phi)
    if not exact and B < 99:
        raise ParameterError(f"A permutation test needs at least 99 permutations, got {B}")
    m, n = data.m, data.n
    size = m + n
    phi_matrix = apply_score_map(pooled_pair_scores(data), phi, weights)
    u_obs = float(phi_matrix[:m, m:].mean())
    bound = abs(u_obs) - 1e-12

    if exact:
        total = math.comb(size, m)
        if total > MAX_EXACT_SPLITS:
            raise ParameterError(f"Exact enumeration of {total} splits exceeds {MAX_EXACT_SPLITS}")
        masks = np.zeros((total, size), dtype=bool)
        for row, chosen in enumerate(itertools.combinations(range(size), m)):
            masks[row, list(chosen)] = True
        stats = _split_statistics(phi_matrix, masks, m, n)
        p_value = float(np.count_nonzero(np.abs(stats) >= bound) / total)
        inference = {"permutations": "exact", "splits": total}
    else:
        rng = substream(seed, "permutations")
        perms = rng.permuted(np.tile(np.arange(size), (B, 1)), axis=1)
        masks = np.zeros((B, size), dtype=bool)
        np.put_along_axis(masks, perms[:, :m], True, axis=1)
        stats = _split_statistics(phi_matrix, masks, m, n)
        p_value = float((1 + np.count_nonzero(np.abs(stats) >= bound)) / (B + 1))
        inference = {"permutations": B, "seed": seed}

    return TestOutcome(
        statistic=u_obs,
        threshold=alpha,
        reject=bool(p_value < alpha),
        method=method or phi.value,
        alpha=alpha,
        p_value=p_value,
        meta={"phi": phi.value, **inference},
    )
