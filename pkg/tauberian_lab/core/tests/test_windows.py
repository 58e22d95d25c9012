"""
Tests for the exponential profile, the s bounds and the window measures
"""
import math

import numpy as np
from django.test import SimpleTestCase

from tauberian_lab.core.arith import build_arith_table
from tauberian_lab.core.estimates import Constants
from tauberian_lab.core.exceptions import DomainError, PreconditionError, RangeLimitError
from tauberian_lab.core.tauberian import build_instance, zero_instance
from tauberian_lab.core.windows import (
    Branch, ExpProfile, WindowParams, average_bound_report, check_condition_s1, corollary_E2_check,
    corollary_report, dichotomy_report, exp_transform, find_crossing_pairs, fixture_reports,
    isoperimetric_check, lemma_E1_dichotomy, measure_E, random_dichotomy_fixture,
    random_isoperimetric_fixture, s_bounds, s_bounds_report, tightest_s_bounds, window_measure_report,
)

CONSTANTS = Constants(gamma=0.5772156649015329, c=-0.0728158454836767)
SEED = 20240601


class ProfileTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.table = build_arith_table(100_000, cap=100_000)
        cls.psi = build_instance('PSI', cls.table, CONSTANTS)
        cls.profile = exp_transform(cls.psi, math.log(100_000), 1e-3)

    def test_zero_instance(self):
        profile = exp_transform(zero_instance(), 5.0, 1e-2)
        self.assertFalse(np.any(profile.s))
        self.assertEqual(profile.M, 0.0)
        self.assertEqual(profile.M_prime, 0.0)
        self.assertTrue(check_condition_s1(profile).passed)

    def test_psi_starts_at_minus_one(self):
        self.assertEqual(self.profile.s[0], -1.0)
        self.assertEqual(self.profile.M, 1.0)
        self.assertGreater(self.profile.M_prime, 0.0)

    def test_grid_covers_zero_to_T(self):
        self.assertAlmostEqual(self.profile.T, math.log(100_000), delta=1e-3)
        self.assertEqual(self.profile.ts[1], 1e-3)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            exp_transform(self.psi, 0.0, 1e-3)
        with self.assertRaises(DomainError):
            exp_transform(self.psi, 5.0, 0.02)
        with self.assertRaises(RangeLimitError):
            exp_transform(self.psi, math.log(200_000), 1e-3)

    def test_condition_s1_with_M_one(self):
        report = check_condition_s1(self.profile)
        self.assertTrue(report.passed)

    def test_condition_s1_fails_with_M_zero(self):
        report = check_condition_s1(self.profile, M=0.0)
        self.assertFalse(report.passed)
        self.assertGreater(report.location, 0.0)
        self.assertLessEqual(report.location, math.log(2))

    def test_s_bounds_hold_on_psi(self):
        self.assertTrue(s_bounds_report(self.profile).passed)

    def test_average_bound(self):
        params = WindowParams.for_profile(self.profile)
        self.assertTrue(average_bound_report(self.profile, params).passed)


class SBoundsTests(SimpleTestCase):

    def test_formula(self):
        lower, upper = s_bounds(1.0, 1.0, 1.0)
        self.assertAlmostEqual(upper, (2 + math.exp(-1)) / (1 - math.exp(-1)), places=12)
        self.assertAlmostEqual(lower, -math.e / (math.e - 1), places=12)
        self.assertAlmostEqual(upper, 3.746, places=3)
        self.assertAlmostEqual(lower, -1.582, places=3)

    def test_zero_constants(self):
        self.assertEqual(s_bounds(0.0, 0.0, 3.0), (0.0, 0.0))

    def test_large_h_stays_finite(self):
        lower, upper = s_bounds(1.0, 1.0, 800.0)
        self.assertTrue(math.isfinite(lower) and math.isfinite(upper))
        self.assertAlmostEqual(lower, -1.0, places=12)

    def test_domain(self):
        with self.assertRaises(DomainError):
            s_bounds(1.0, 1.0, 0.0)
        with self.assertRaises(DomainError):
            s_bounds(-1.0, 1.0, 1.0)

    def test_tightest_bounds(self):
        tight = tightest_s_bounds(1.0, 1.0)
        self.assertLessEqual(tight.upper, s_bounds(1.0, 1.0, 1.0).upper)
        self.assertGreaterEqual(tight.lower, s_bounds(1.0, 1.0, 1.0).lower)
        self.assertLess(tight.lower, tight.upper)


class WindowParamsTests(SimpleTestCase):

    def test_e_and_minimal_h(self):
        params = WindowParams.minimal(S=2.0, S1=1.0, S2=0.5, M=1.0, M_prime=0.5)
        self.assertAlmostEqual(params.e, math.log(2.0 / 1.5), places=15)
        self.assertAlmostEqual(params.h, 2 * (params.e + 0.5 + 1.0), places=14)

    def test_equal_thresholds_allowed(self):
        params = WindowParams.minimal(S=2.0, S1=1.0, S2=1.0, M=0.0, M_prime=0.0)
        self.assertEqual(params.e, 0.0)

    def test_invalid(self):
        with self.assertRaises(PreconditionError):
            WindowParams.minimal(S=1.0, S1=1.0, S2=0.5, M=0.0, M_prime=0.0)
        with self.assertRaises(PreconditionError):
            WindowParams(S=2.0, S1=1.0, S2=0.5, M=0.0, M_prime=1.0, h=0.1)

    def test_for_vanishing_profile(self):
        profile = ExpProfile.from_samples(np.zeros(100), 1e-2, M=0.0)
        with self.assertRaises(PreconditionError):
            WindowParams.for_profile(profile)


class MeasureTests(SimpleTestCase):

    def setUp(self):
        self.params = WindowParams.minimal(S=1.0, S1=0.5, S2=0.25, M=1.0, M_prime=0.0)

    def test_zero_profile_measures_h(self):
        profile = ExpProfile.from_samples(np.zeros(1001), 1e-2, M=1.0, M_prime=0.0)
        self.assertAlmostEqual(measure_E(profile, 0.0, self.params), self.params.h, delta=1.1e-2)

    def test_large_profile_measures_zero(self):
        profile = ExpProfile.from_samples(np.full(1001, 2 * self.params.S1), 1e-2, M=1.0, M_prime=0.0)
        self.assertEqual(measure_E(profile, 1.0, self.params), 0.0)

    def test_window_outside_domain(self):
        profile = ExpProfile.from_samples(np.zeros(11), 1e-2, M=1.0, M_prime=0.0)
        with self.assertRaises(RangeLimitError):
            measure_E(profile, 0.0, self.params)
        self.assertAlmostEqual(measure_E(profile, 0.0, self.params, clip=True), 0.11, places=12)

    def test_isoperimetric_constant_k(self):
        ts = np.arange(2001) * 1e-3
        check = isoperimetric_check(ts, np.full(ts.size, 2.0), C1=2.0, C2=1.0)
        self.assertTrue(check.passed)
        self.assertAlmostEqual(check.bound, math.log(2), places=15)
        self.assertAlmostEqual(check.measure, 0.694, delta=1.5e-3)

    def test_isoperimetric_preconditions(self):
        ts = np.arange(2001) * 1e-3
        with self.assertRaises(PreconditionError) as cm:
            isoperimetric_check(ts, np.full(ts.size, 1.0), C1=2.0, C2=1.0)
        self.assertEqual(cm.exception.condition, 'k(t1) >= C1 e^t1')
        with self.assertRaises(PreconditionError) as cm:
            isoperimetric_check(ts, np.full(ts.size, 2.0), C1=1.0, C2=2.0)
        self.assertEqual(cm.exception.condition, 'C1 > C2 > 0')
        with self.assertRaises(PreconditionError) as cm:
            isoperimetric_check(ts, np.full(ts.size, 20.0), C1=2.0, C2=1.0)
        self.assertEqual(cm.exception.condition, 'k(t2) <= C2 e^t2')

    def test_isoperimetric_fixtures(self):
        rng = np.random.default_rng(SEED)
        for _ in range(500):
            ts, k, C1, C2 = random_isoperimetric_fixture(rng)
            check = isoperimetric_check(ts, k, C1, C2)
            self.assertGreaterEqual(check.measure, check.bound - 2 * 1e-3)

    def test_dichotomy_fixtures(self):
        rng = np.random.default_rng(SEED)
        for _ in range(500):
            profile, x, params = random_dichotomy_fixture(rng)
            result = lemma_E1_dichotomy(profile, x, params)
            self.assertTrue(result.found, result.notes)
            if result.branch is Branch.CROSSING:
                self.assertLess(result.t1, result.t2)

    def test_fixture_reports(self):
        for report in fixture_reports(np.random.default_rng(SEED), trials=50):
            self.assertTrue(report.passed, report.name)

    def test_dichotomy_needs_positive_e(self):
        profile = ExpProfile.from_samples(np.zeros(1001), 1e-2, M=1.0, M_prime=0.0)
        params = WindowParams.minimal(S=1.0, S1=0.5, S2=0.5, M=1.0, M_prime=0.0)
        with self.assertRaises(PreconditionError):
            lemma_E1_dichotomy(profile, 0.0, params)


class CrossingTests(SimpleTestCase):

    def test_find_crossing_pairs(self):
        s = np.array([0.0, 1.0, 0.8, 1.2, 0.5, 0.1, 0.0, 1.5, 0.05])
        profile = ExpProfile.from_samples(s, 0.5, M=1.0)
        self.assertEqual(find_crossing_pairs(profile, 1.0, 0.2), [(1.5, 2.5), (3.5, 4.0)])
        self.assertEqual(find_crossing_pairs(profile, 1.0, 0.2, limit=1), [(1.5, 2.5)])

    def test_corollary_equal_thresholds(self):
        s = np.array([1.0, 1.0, 0.5])
        profile = ExpProfile.from_samples(s, 1e-2, M=1.0)
        params = WindowParams.minimal(S=2.0, S1=0.5, S2=0.5, M=1.0, M_prime=profile.M_prime)
        check = corollary_E2_check(profile, 0.0, 0.02, params)
        self.assertTrue(check.passed)
        self.assertEqual(check.bound, 0.0)

    def test_corollary_preconditions(self):
        s = np.array([0.1, 1.0, 0.5])
        profile = ExpProfile.from_samples(s, 1e-2, M=1.0)
        params = WindowParams.minimal(S=2.0, S1=0.8, S2=0.4, M=1.0, M_prime=profile.M_prime)
        with self.assertRaises(PreconditionError):
            corollary_E2_check(profile, 0.0, 0.02, params)


class PsiWindowTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        table = build_arith_table(100_000, cap=100_000)
        psi = build_instance('PSI', table, CONSTANTS)
        cls.profile = exp_transform(psi, math.log(100_000), 1e-3)
        cls.params = WindowParams.for_profile(cls.profile)
        cls.positions = [float(p) for p in np.linspace(0.0, 0.95 * cls.profile.T, 20)]

    def test_window_measures(self):
        self.assertTrue(window_measure_report(self.profile, self.params, self.positions).passed)

    def test_dichotomy_never_contradicted(self):
        report, results = dichotomy_report(self.profile, self.params, self.positions)
        self.assertTrue(report.passed)
        self.assertEqual(len(results), 20)
        self.assertNotIn(Branch.COUNTEREXAMPLE, [r.branch for r in results])

    def test_corollary_at_crossing_pairs(self):
        pairs = find_crossing_pairs(self.profile, self.params.S1, self.params.S2)
        self.assertTrue(corollary_report(self.profile, self.params, pairs).passed)
