import math

import numpy as np
from django.test import SimpleTestCase

from hlawka.boundary import (
    FREE_KEYS,
    CaseTag,
    DependenceCase,
    PIntervalKind,
    classify_equality,
    endpoint_dominance_check,
    factored_xi,
    identity_residual,
    p_interval,
    solve_condition_mu,
    substitute_dependence,
)
from hlawka.exceptions import FreeBlockError, NotPsdError, PreconditionError
from hlawka.gram import VectorTriple, gram_determinant, gram_from_vectors, realize_vectors
from hlawka.inequalities import reduced_forms, strong_hlawka_slack, xi_quartic

UNIT_FREE = {"nsq_x": 1.0, "nsq_y": 1.0, "p": 0.0}


def random_free_block(rng, tag):
    u, v = rng.standard_normal((2, 2)) * math.exp(rng.standard_normal())
    first, second, cross = FREE_KEYS[tag]
    return {first: float(u @ u), second: float(v @ v), cross: float(u @ v)}


class SubstitutionTests(SimpleTestCase):
    def test_case_i_unit_coefficients(self):
        g = substitute_dependence(DependenceCase(CaseTag.CASE_I, 1, 1), UNIT_FREE)
        self.assertEqual(g.as_tuple(), (1.0, 1.0, 2.0, 0.0, 1.0, 1.0))

    def test_case_i_z_equals_x(self):
        g = substitute_dependence(DependenceCase(CaseTag.CASE_I, 1, 0), UNIT_FREE)
        self.assertEqual(g.as_tuple(), (1.0, 1.0, 1.0, 0.0, 1.0, 0.0))

    def test_case_i_zero_combination(self):
        g = substitute_dependence(DependenceCase(CaseTag.CASE_I, 0, 0), UNIT_FREE)
        self.assertEqual((g.nsq_z, g.q, g.r), (0.0, 0.0, 0.0))

    def test_cases_ii_and_iii_place_the_dependent_vector(self):
        g = substitute_dependence(DependenceCase(CaseTag.CASE_II, 2, -1), {"nsq_y": 1.0, "nsq_z": 4.0, "r": 1.0})
        # x = 2y - z
        self.assertEqual(g.as_tuple(), (4.0 + 4.0 - 4.0, 1.0, 4.0, 2.0 - 1.0, 2.0 - 4.0, 1.0))
        g = substitute_dependence(DependenceCase(CaseTag.CASE_III, 1, 1), {"nsq_x": 1.0, "nsq_z": 1.0, "q": 0.0})
        self.assertEqual(g.as_tuple(), (1.0, 2.0, 1.0, 1.0, 0.0, 1.0))

    def test_wrong_free_keys(self):
        with self.assertRaises(FreeBlockError):
            substitute_dependence(DependenceCase(CaseTag.CASE_II, 1, 1), UNIT_FREE)
        with self.assertRaises(FreeBlockError):
            factored_xi(DependenceCase(CaseTag.CASE_I, 1, 1), {"nsq_x": 1.0, "nsq_y": 1.0})

    def test_non_psd_free_block(self):
        with self.assertRaises(NotPsdError):
            substitute_dependence(DependenceCase(CaseTag.CASE_I, 1, 1), {"nsq_x": 1.0, "nsq_y": 1.0, "p": 2.0})

    def test_substituted_points_are_singular(self):
        rng = np.random.default_rng(12)
        for tag in CaseTag:
            for _ in range(300):
                case = DependenceCase(tag, *rng.uniform(-3, 3, 2))
                g = substitute_dependence(case, random_free_block(rng, tag))
                self.assertLessEqual(abs(g.determinant()), 1e-9 * g.scale ** 3)


class FactoredFormTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(factored_xi(DependenceCase(CaseTag.CASE_I, 1, 1), UNIT_FREE), 0.0)
        self.assertEqual(factored_xi(DependenceCase(CaseTag.CASE_I, 1, 0), UNIT_FREE), 4.0)
        self.assertEqual(
            factored_xi(DependenceCase(CaseTag.CASE_II, 0, 0), {"nsq_y": 2.0, "nsq_z": 3.0, "r": 1.0}), 0.0
        )

    def test_identity_examples(self):
        self.assertEqual(identity_residual(DependenceCase(CaseTag.CASE_I, 1, 1), UNIT_FREE), 0.0)
        self.assertEqual(identity_residual(DependenceCase(CaseTag.CASE_I, 1, 0), UNIT_FREE), 0.0)
        self.assertEqual(xi_quartic(substitute_dependence(DependenceCase(CaseTag.CASE_I, 1, 0), UNIT_FREE)), 4.0)

    def test_factorization_holds_on_random_draws(self):
        rng = np.random.default_rng(7)
        for tag in CaseTag:
            worst = 0.0
            for _ in range(3000):
                case = DependenceCase(tag, *rng.uniform(-3, 3, 2))
                free = random_free_block(rng, tag)
                worst = max(worst, identity_residual(case, free))
                g = substitute_dependence(case, free)
                self.assertGreaterEqual(factored_xi(case, free), -1e-9 * g.scale ** 4)
            self.assertLessEqual(worst, 1e-10, tag)

    def test_condition_roots_zero_the_factored_form(self):
        rng = np.random.default_rng(8)
        for tag in CaseTag:
            for _ in range(200):
                lam = rng.uniform(-3, 3)
                free = random_free_block(rng, tag)
                for mu in solve_condition_mu(DependenceCase(tag), lam, free):
                    case = DependenceCase(tag, lam, mu)
                    g = substitute_dependence(case, free)
                    self.assertLessEqual(abs(factored_xi(case, free)), 1e-9 * g.scale ** 4)

    def test_condition_roots_for_case_i(self):
        roots = solve_condition_mu(DependenceCase(CaseTag.CASE_I), 1.0, UNIT_FREE)
        self.assertEqual(len(roots), 2)
        self.assertAlmostEqual(roots[0], -2.0)
        self.assertAlmostEqual(roots[1], 1.0)


class PIntervalTests(SimpleTestCase):
    def test_examples(self):
        interval = p_interval(1, 1, 1, 0, 0)
        self.assertIs(interval.kind, PIntervalKind.INTERVAL)
        self.assertAlmostEqual(interval.lo, -1.0)
        self.assertAlmostEqual(interval.hi, 1.0)

        interval = p_interval(1, 1, 1, 0.5, 0.5)
        self.assertIs(interval.kind, PIntervalKind.INTERVAL)
        self.assertAlmostEqual(interval.lo, -0.5)
        self.assertAlmostEqual(interval.hi, 1.0)

        interval = p_interval(1, 1, 0, 0, 0)
        self.assertIs(interval.kind, PIntervalKind.FULL_SEGMENT)
        self.assertEqual((interval.lo, interval.hi), (-1.0, 1.0))

    def test_parallel_x_and_z_pin_p(self):
        interval = p_interval(1, 1, 1, 1, 0.5)
        self.assertIs(interval.kind, PIntervalKind.POINT)
        self.assertAlmostEqual(interval.lo, 0.5)

    def test_precondition(self):
        with self.assertRaises(PreconditionError):
            p_interval(1, 1, 1, 2, 0)
        with self.assertRaises(PreconditionError):
            p_interval(-1, 1, 1, 0, 0)

    def test_endpoints_are_roots_of_the_determinant(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            x, y, z = rng.standard_normal((3, 3))
            a2, b2, c2, q, r = x @ x, y @ y, z @ z, x @ z, y @ z
            interval = p_interval(a2, b2, c2, q, r)
            self.assertIs(interval.kind, PIntervalKind.INTERVAL)
            scale = max(1.0, a2, b2, c2)
            for p in (interval.lo, interval.hi):
                self.assertLessEqual(abs(gram_determinant(a2, b2, c2, p, q, r)), 1e-9 * scale ** 3)
            self.assertLessEqual(interval.lo, x @ y + 1e-9 * scale)
            self.assertGreaterEqual(interval.hi, x @ y - 1e-9 * scale)
            self.assertTrue(endpoint_dominance_check(a2, b2, c2, q, r, samples=101))

    def test_dominance_examples(self):
        self.assertTrue(endpoint_dominance_check(1, 1, 1, 0, 0, samples=101))
        self.assertTrue(endpoint_dominance_check(1, 1, 1, 0.5, 0.5))
        self.assertTrue(endpoint_dominance_check(1, 1, 1, 1, 0.5))


class ClassifyEqualityTests(SimpleTestCase):
    def witness_for(self, witnesses, tag):
        return next((w for w in witnesses if w.case.tag is tag), None)

    def test_unit_example(self):
        witnesses = classify_equality(VectorTriple((1, 0), (0, 1), (1, 1)))
        witness = self.witness_for(witnesses, CaseTag.CASE_I)
        self.assertIsNotNone(witness)
        self.assertAlmostEqual(witness.case.lam, 1.0, places=9)
        self.assertAlmostEqual(witness.case.mu, 1.0, places=9)

    def test_sign_of_reduced_side_rules_out_equality(self):
        t = VectorTriple((1, 0), (1, 0), (0, 1))
        self.assertEqual(classify_equality(t), [])
        self.assertAlmostEqual(strong_hlawka_slack(t).slack, 1.2361, places=4)

    def test_condition_with_negative_reduced_side_is_not_equality(self):
        for lam in (0.5, 1.0, 2.0):
            t = VectorTriple((1, 0), (0, 1), (lam, -(1 + lam)))
            self.assertLess(reduced_forms(gram_from_vectors(t)).R_bold, 0.0)
            self.assertEqual(classify_equality(t), [])
            self.assertGreater(strong_hlawka_slack(t).slack, 0.1)

    def test_orthonormal_triple(self):
        self.assertEqual(classify_equality(VectorTriple((1, 0, 0), (0, 1, 0), (0, 0, 1))), [])

    def test_zero_vector(self):
        witnesses = classify_equality(VectorTriple((2, 1), (-1, 3), (0, 0)))
        witness = self.witness_for(witnesses, CaseTag.CASE_I)
        self.assertIsNotNone(witness)
        self.assertAlmostEqual(witness.case.lam, 0.0, places=12)
        self.assertAlmostEqual(witness.case.mu, 0.0, places=12)

    def test_equal_vectors_resolve_the_collinear_span(self):
        witnesses = classify_equality(VectorTriple((1.0,), (1.0,), (1.0,)))
        self.assertEqual({w.case.tag for w in witnesses}, set(CaseTag))
        witness = self.witness_for(witnesses, CaseTag.CASE_I)
        self.assertAlmostEqual(witness.case.lam, 0.5, places=9)
        self.assertAlmostEqual(witness.case.mu, 0.5, places=9)

    def test_generated_equality_points_are_recognized(self):
        rng = np.random.default_rng(99)
        checked = 0
        while checked < 300:
            tag = list(CaseTag)[checked % 3]
            lam = rng.uniform(-3, 3)
            free = random_free_block(rng, tag)
            first, second, cross = (free[key] for key in FREE_KEYS[tag])
            if first * second - cross * cross < 1e-3 * first * second:
                continue
            roots = solve_condition_mu(DependenceCase(tag), lam, free)
            if not roots:
                continue
            g = substitute_dependence(DependenceCase(tag, lam, roots[int(rng.integers(len(roots)))]), free)
            if reduced_forms(g).R_bold < 0:
                continue
            t = realize_vectors(g)
            witnesses = classify_equality(t)
            self.assertTrue(any(w.case.tag is tag for w in witnesses), (tag, g))
            self.assertLessEqual(abs(strong_hlawka_slack(t).slack), 1e-8 * g.scale ** 2)
            checked += 1

    def test_witnesses_imply_equality(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            t = VectorTriple.from_array(rng.standard_normal((3, 2)))
            if classify_equality(t):
                self.assertTrue(strong_hlawka_slack(t).is_equality)

    def test_triples_just_off_the_plane(self):
        for delta in (1e-4, 1e-5, 1e-6):
            t = VectorTriple((1, 0, 0), (0, 1, 0), (1, 1, delta))
            strong = strong_hlawka_slack(t)
            witnesses = classify_equality(t)
            self.assertEqual(bool(witnesses), strong.is_equality, delta)
            if delta > 1e-5:
                continue
            self.assertTrue(strong.is_equality, delta)
            witness = self.witness_for(witnesses, CaseTag.CASE_I)
            self.assertIsNotNone(witness, delta)
            self.assertAlmostEqual(witness.case.lam, 1.0, places=4)
            self.assertAlmostEqual(witness.case.mu, 1.0, places=4)

    def test_witnesses_follow_the_slack_near_equality(self):
        rng = np.random.default_rng(17)
        for delta in (1e-3, 1e-4, 1e-5, 1e-6):
            for _ in range(100):
                x, y, noise = rng.standard_normal((3, 3))
                t = VectorTriple.from_array(np.array([x, y, x + y + delta * noise]))
                self.assertEqual(bool(classify_equality(t)), strong_hlawka_slack(t).is_equality, delta)

    def test_rank_three_triples_have_no_witnesses(self):
        rng = np.random.default_rng(6)
        for _ in range(1000):
            self.assertEqual(classify_equality(VectorTriple.from_array(rng.standard_normal((3, 3)))), [])

