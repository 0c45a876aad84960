import numpy as np
import pytest

from mvrank.assign import (
    AssignmentProblem,
    assignment_cost,
    brute_force_lap,
    cost_matrix,
    solve_lap,
)
from mvrank.errors import AssignmentError


# ---------------------------------------------------------------------------
# cost_matrix / AssignmentProblem
# ---------------------------------------------------------------------------

class TestCostMatrix:
    def test_single_pair(self):
        np.testing.assert_allclose(cost_matrix([[0, 0]], [[3, 4]]), [[25.0]])

    def test_identical_sets_have_zero_diagonal(self):
        pts = np.random.default_rng(0).random((6, 3))
        np.testing.assert_allclose(np.diag(cost_matrix(pts, pts)), 0.0)

    def test_matches_naive_loop(self):
        rng = np.random.default_rng(1)
        a, b = rng.random((5, 2)), rng.random((5, 2))
        naive = np.array([[np.sum((a[i] - b[j]) ** 2) for j in range(5)] for i in range(5)])
        np.testing.assert_allclose(cost_matrix(a, b), naive)

    def test_dimension_mismatch(self):
        with pytest.raises(AssignmentError):
            cost_matrix([[0, 0]], [[1, 2, 3]])

    def test_problem_size_mismatch(self):
        with pytest.raises(AssignmentError):
            AssignmentProblem(np.zeros((2, 1)), np.zeros((3, 1)))

    def test_vectors_are_scalar_observations(self):
        np.testing.assert_allclose(cost_matrix([1.0, 3.0], [2.0]), [[1.0], [1.0]])
        assert AssignmentProblem([1.0, 3.0], [0.2, 0.4]).sources.shape == (2, 1)


# ---------------------------------------------------------------------------
# solve_lap
# ---------------------------------------------------------------------------

class TestSolveLap:
    def test_nearest_matching(self):
        result = solve_lap(AssignmentProblem(np.array([[0, 0], [1, 1]]), np.array([[0.9, 0.9], [0.1, 0.1]])))
        np.testing.assert_array_equal(result.perm, [1, 0])
        assert result.total_cost == pytest.approx(0.04)

    def test_single_element(self):
        np.testing.assert_array_equal(solve_lap([[3.0]]).perm, [0])

    def test_non_finite_cost(self):
        with pytest.raises(AssignmentError):
            solve_lap([[1.0, np.inf], [0.0, 1.0]])

    def test_total_cost_recomputable(self):
        rng = np.random.default_rng(2)
        problem = AssignmentProblem(rng.random((30, 3)), rng.random((30, 3)))
        result = solve_lap(problem)
        assert sorted(result.perm.tolist()) == list(range(30))
        assert result.total_cost == pytest.approx(assignment_cost(problem.cost(), result.perm), rel=1e-9)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            size = int(rng.integers(1, 8))
            cost = rng.random((size, size))
            assert solve_lap(cost).total_cost == brute_force_lap(cost).total_cost

    def test_inner_product_objective_is_equivalent(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            problem = AssignmentProblem(rng.random((6, 2)), rng.random((6, 2)))
            assert solve_lap(problem, objective="inner_product").total_cost == pytest.approx(
                solve_lap(problem).total_cost
            )

    def test_unknown_objective(self):
        with pytest.raises(AssignmentError):
            solve_lap([[1.0]], objective="manhattan")

    def test_no_random_permutation_is_cheaper(self):
        rng = np.random.default_rng(5)
        problem = AssignmentProblem(rng.normal(size=(40, 3)), rng.random((40, 3)))
        cost = problem.cost()
        best = solve_lap(problem).total_cost
        for _ in range(100):
            assert best <= assignment_cost(cost, rng.permutation(40)) + 1e-12

    def test_simultaneous_reordering_keeps_the_matching(self):
        rng = np.random.default_rng(6)
        sources, targets = rng.normal(size=(25, 2)), rng.random((25, 2))
        base = solve_lap(AssignmentProblem(sources, targets))
        p, q = rng.permutation(25), rng.permutation(25)
        moved = solve_lap(AssignmentProblem(sources[p], targets[q]))
        assert moved.total_cost == pytest.approx(base.total_cost, rel=1e-12)
        np.testing.assert_array_equal(q[moved.perm], base.perm[p])


# ---------------------------------------------------------------------------
# brute_force_lap
# ---------------------------------------------------------------------------

class TestBruteForce:
    def test_ties_give_identity(self):
        np.testing.assert_array_equal(brute_force_lap(np.ones((4, 4))).perm, [0, 1, 2, 3])

    def test_two_by_two(self):
        result = brute_force_lap([[1, 2], [3, 1]])
        np.testing.assert_array_equal(result.perm, [0, 1])
        assert result.total_cost == 2

    def test_too_large(self):
        with pytest.raises(AssignmentError):
            brute_force_lap(np.zeros((10, 10)))
