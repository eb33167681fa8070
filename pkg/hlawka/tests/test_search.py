import math

import numpy as np
from django.test import SimpleTestCase

from hlawka.exceptions import PreconditionError
from hlawka.gram import GramParams
from hlawka.inequalities import InequalityId, xi_polynomial
from hlawka.search import (
    SearchConfig,
    find_equality_points,
    gram_of_factor,
    grid_oracle,
    minimize_xi,
    xi_gradient,
)

# columns x = y = z = e1
EQUAL_VECTORS_FACTOR = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def cosines(g):
    return (
        g.p / math.sqrt(g.nsq_x * g.nsq_y),
        g.q / math.sqrt(g.nsq_x * g.nsq_z),
        g.r / math.sqrt(g.nsq_y * g.nsq_z),
    )


class XiGradientTests(SimpleTestCase):
    def test_orthonormal(self):
        self.assertEqual(xi_gradient(GramParams(1, 1, 1, 0, 0, 0)), (4.0, 4.0, 4.0, 2.0, 2.0, 2.0))

    def test_equal_vectors(self):
        self.assertEqual(xi_gradient(GramParams(1, 1, 1, 1, 1, 1)), (4.0, 4.0, 16.0, 8.0, -16.0, -16.0))

    def test_matches_central_differences(self):
        rng = np.random.default_rng(21)
        h = 1e-6
        for _ in range(1000):
            factor = rng.standard_normal((3, 3))
            g = GramParams.from_matrix(factor.T @ factor)
            point = g.as_array()
            numeric = np.empty(6)
            for k in range(6):
                step = np.zeros(6)
                step[k] = h * g.scale
                numeric[k] = (xi_polynomial(*(point + step)) - xi_polynomial(*(point - step))) / (2.0 * h * g.scale)
            analytic = np.array(xi_gradient(g))
            error = np.linalg.norm(analytic - numeric) / max(1.0, np.linalg.norm(analytic))
            self.assertLessEqual(error, 1e-5)


class MinimizeXiTests(SimpleTestCase):
    def test_config_validation(self):
        with self.assertRaises(PreconditionError):
            SearchConfig(restarts=0)
        with self.assertRaises(PreconditionError):
            SearchConfig(step_init=0.0)
        with self.assertRaises(PreconditionError):
            SearchConfig(seed=-1)

    def test_start_at_a_minimizer(self):
        result = minimize_xi(SearchConfig(restarts=1), start=EQUAL_VECTORS_FACTOR)
        self.assertAlmostEqual(result.min_value, 0.0, places=12)
        self.assertEqual(result.iterations, 0)
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.argmin_gram.trace, 1.0, places=12)
        self.assertAlmostEqual(result.det_at_argmin, 0.0, places=12)

    def test_values_stay_nonnegative_and_decrease(self):
        cfg = SearchConfig(restarts=4, max_iters=300, seed=1)
        result = minimize_xi(cfg)
        self.assertEqual(len(result.restarts), 4)
        self.assertEqual(result.min_value, min(outcome.value for outcome in result.restarts))
        for outcome in result.restarts:
            self.assertGreaterEqual(outcome.value, -1e-12)
            self.assertGreaterEqual(outcome.det, -1e-12)
        self.assertAlmostEqual(result.argmin_gram.trace, 1.0, places=9)
        self.assertEqual(gram_of_factor(result.argmin_factor), result.argmin_gram)

        start = np.random.default_rng([cfg.seed, 0]).standard_normal((3, 3))
        start = start / np.linalg.norm(start)
        self.assertLessEqual(result.restarts[0].value, xi_polynomial(*gram_of_factor(start).as_array()))

    def test_same_seed_same_result(self):
        cfg = SearchConfig(restarts=3, max_iters=100, seed=7)
        first, second = minimize_xi(cfg), minimize_xi(cfg)
        self.assertEqual(first.restarts, second.restarts)
        self.assertEqual(first.argmin_gram, second.argmin_gram)
        other = minimize_xi(SearchConfig(restarts=3, max_iters=100, seed=8))
        self.assertNotEqual(first.restarts, other.restarts)

    def test_full_restart_set_reaches_the_boundary(self):
        result = minimize_xi(SearchConfig(restarts=64, seed=1))
        self.assertEqual(len(result.restarts), 64)
        self.assertGreaterEqual(result.min_value, -1e-9)
        self.assertLessEqual(result.min_value, 1e-6)
        self.assertLessEqual(abs(result.det_at_argmin), 1e-6)
        for outcome in result.stationary_points:
            self.assertTrue(outcome.converged)
            self.assertGreater(outcome.value, result.tol)
            self.assertIn(outcome, result.restarts)

    def test_quadratic_objective(self):
        result = minimize_xi(SearchConfig(restarts=2, max_iters=200, seed=2, objective=InequalityId.GRAM_QUADRATIC_Q))
        self.assertGreaterEqual(result.min_value, -1e-9)


class GridOracleTests(SimpleTestCase):
    def test_minimum_is_zero(self):
        result = grid_oracle(resolution=5)
        self.assertAlmostEqual(result.min_value, 0.0, places=9)
        self.assertGreater(result.admissible_points, 0)
        self.assertLessEqual(result.admissible_points, 5 ** 6)

    def test_resolution_is_checked(self):
        with self.assertRaises(PreconditionError):
            grid_oracle(resolution=1)


class EqualityPointTests(SimpleTestCase):
    def test_negative_corollary_points_have_half_cosines(self):
        points = find_equality_points(InequalityId.COROLLARY_NEG, SearchConfig(restarts=8, seed=3))
        self.assertGreaterEqual(len(points), 1)
        for point in points:
            self.assertIs(point.report.inequality_id, InequalityId.COROLLARY_NEG)
            self.assertLess(point.gram.p * point.gram.q * point.gram.r, 0.0)
            for cosine in cosines(point.gram):
                self.assertAlmostEqual(abs(cosine), 0.5, delta=0.05)

    def test_positive_corollary_points_are_collinear(self):
        points = find_equality_points(InequalityId.COROLLARY_POS, SearchConfig(restarts=8, seed=4))
        self.assertGreaterEqual(len(points), 1)
        for point in points:
            self.assertIs(point.report.inequality_id, InequalityId.COROLLARY_POS)
            for cosine in cosines(point.gram):
                self.assertAlmostEqual(abs(cosine), 1.0, delta=0.05)

    def test_strong_points_carry_witnesses(self):
        points = find_equality_points("strong_hlawka", SearchConfig(restarts=8, seed=5))
        self.assertGreaterEqual(len(points), 1)
        for point in points:
            self.assertTrue(point.witnesses)
            self.assertLessEqual(abs(point.report.slack), 1e-7 * point.gram.scale ** 2)
