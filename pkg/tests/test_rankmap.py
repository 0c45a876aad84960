import numpy as np
import pytest

from mvrank import lds
from mvrank.assign import brute_force_lap, cost_matrix
from mvrank.errors import AssignmentError
from mvrank.lds import PointSet, SequenceKind
from mvrank.rankmap import empirical_ranks, standardize_columns


def _grid(values):
    return PointSet(np.asarray(values, dtype=float).reshape(-1, 1), SequenceKind.UNIFORM)


class TestEmpiricalRanks:
    def test_one_dimension_is_sorted_matching(self):
        ra = empirical_ranks([[1.0], [3.0]], [[2.0], [4.0]], _grid([0.2, 0.4, 0.6, 0.8]))
        np.testing.assert_allclose(ra.ranks_x[:, 0], [0.2, 0.6])
        np.testing.assert_allclose(ra.ranks_y[:, 0], [0.4, 0.8])

    def test_scalar_arms(self):
        ra = empirical_ranks([1.0, 3.0], [2.0, 4.0], _grid([0.2, 0.4, 0.6, 0.8]))
        np.testing.assert_allclose(ra.ranks_x[:, 0], [0.2, 0.6])
        np.testing.assert_allclose(ra.ranks_y[:, 0], [0.4, 0.8])

    def test_two_points(self):
        ra = empirical_ranks([[0.0]], [[10.0]], _grid([0.9, 0.1]))
        assert ra.ranks_x[0, 0] == 0.1
        assert ra.ranks_y[0, 0] == 0.9

    def test_matches_sort_oracle_in_one_dimension(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            m, n = int(rng.integers(1, 10)), int(rng.integers(1, 10))
            x, y = rng.normal(size=(m, 1)), rng.normal(size=(n, 1))
            ps = lds.sobol(m + n, 1)
            ra = empirical_ranks(x, y, ps)
            pooled = np.concatenate([x[:, 0], y[:, 0]])
            expected = np.empty(m + n)
            expected[np.argsort(pooled)] = np.sort(ps.points[:, 0])
            np.testing.assert_allclose(np.concatenate([ra.ranks_x[:, 0], ra.ranks_y[:, 0]]), expected)

    def test_bijection(self):
        rng = np.random.default_rng(1)
        ps = lds.halton(25, 3)
        ra = empirical_ranks(rng.normal(size=(12, 3)), rng.normal(size=(13, 3)), ps)
        ranks = np.vstack([ra.ranks_x, ra.ranks_y])
        np.testing.assert_array_equal(ranks[np.lexsort(ranks.T)], ps.points[np.lexsort(ps.points.T)])
        assert (ra.m, ra.n) == (12, 13)

    def test_optimal_against_brute_force(self):
        rng = np.random.default_rng(2)
        x, y = rng.normal(size=(3, 2)), rng.normal(size=(4, 2))
        ps = lds.hammersley(7, 2)
        ra = empirical_ranks(x, y, ps)
        best = brute_force_lap(cost_matrix(np.vstack([x, y]), ps.points))
        assert ra.assignment.total_cost == pytest.approx(best.total_cost)

    def test_size_mismatch(self):
        with pytest.raises(AssignmentError):
            empirical_ranks([[1.0]], [[2.0]], lds.halton(3, 1))

    def test_standardize_is_scale_free(self):
        rng = np.random.default_rng(3)
        x, y = rng.normal(size=(10, 2)), rng.normal(size=(10, 2))
        ps = lds.sobol(20, 2)
        scaled = empirical_ranks(x * [1.0, 1000.0], y * [1.0, 1000.0], ps, standardize=True)
        plain = empirical_ranks(x, y, ps, standardize=True)
        np.testing.assert_array_equal(scaled.assignment.perm, plain.assignment.perm)

    @pytest.mark.parametrize("shift,scale", [(5.0, 1.0), (0.0, 0.01), (-3.0, 40.0)])
    def test_translation_and_scaling_keep_ranks(self, shift, scale):
        rng = np.random.default_rng(4)
        x, y = rng.normal(size=(11, 3)), rng.normal(size=(9, 3))
        ps = lds.halton(20, 3)
        moved = empirical_ranks(x * scale + shift, y * scale + shift, ps)
        plain = empirical_ranks(x, y, ps)
        np.testing.assert_array_equal(moved.assignment.perm, plain.assignment.perm)


class TestStandardizeColumns:
    def test_constant_column_only_centred(self):
        out = standardize_columns(np.array([[1.0, 5.0], [3.0, 5.0]]))
        np.testing.assert_allclose(out, [[-1.0, 0.0], [1.0, 0.0]])
