"""
Tests for the Tauberian instances and the integral-inequality harness
"""
import math

import numpy as np
from django.test import SimpleTestCase, tag

from tauberian_lab.core.arith import build_arith_table
from tauberian_lab.core.estimates import Constants
from tauberian_lab.core.exceptions import DomainError, UsageError
from tauberian_lab.core.tauberian import (
    InstanceLabel, TauberianInstance, build_instance, doubling_series, hypothesis_series,
    prop_estim_checks, tail_constant_series, theorem1_decay_report, theorem1_gap_report,
    theorem1_report, theorem1_series, weighted_inversion_residual, zero_instance,
)
from tauberian_lab.core.transforms import StepFunction

CONSTANTS = Constants(gamma=0.5772156649015329, c=-0.0728158454836767)


class InstanceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.table = build_arith_table(1000, cap=1000)

    def test_psi_instance(self):
        inst = build_instance('psi', self.table, CONSTANTS)
        self.assertIs(inst.label, InstanceLabel.PSI)
        self.assertEqual((inst.A, inst.B, inst.C), (1.0, -1.0, 0.0))
        self.assertAlmostEqual(inst.f(10), math.log(2520), places=12)
        self.assertEqual(inst.domain_end, 1001.0)

    def test_mertens_plus_floor_instance(self):
        inst = build_instance(InstanceLabel.MERTENS_PLUS_FLOOR, self.table, CONSTANTS)
        self.assertEqual(inst.f(10), 9.0)
        self.assertAlmostEqual(inst.B, 2 * CONSTANTS.gamma - 1, places=15)
        self.assertTrue(inst.f.non_decreasing)

    def test_custom_is_zero(self):
        inst = build_instance('CUSTOM')
        self.assertEqual(inst.f(100.0), 0.0)
        self.assertEqual(inst.A, 0.0)

    def test_unknown_label(self):
        with self.assertRaises(UsageError):
            build_instance('ZETA', self.table)

    def test_table_required(self):
        with self.assertRaises(UsageError):
            build_instance('PSI')

    def test_rejects_decreasing_f(self):
        with self.assertRaises(DomainError):
            TauberianInstance(StepFunction([2.0], [-1.0]), A=1.0)
        with self.assertRaises(DomainError):
            TauberianInstance(StepFunction([2.0], [1.0]), A=-1.0)


class Theorem1Tests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.table = build_arith_table(100_000, cap=100_000)
        cls.psi = build_instance('PSI', cls.table, CONSTANTS)
        cls.mertens = build_instance('MERTENS_PLUS_FLOOR', cls.table, CONSTANTS)
        cls.xs = [float(x) for x in np.geomspace(100, 100_000, 40)]

    def test_psi_at_two(self):
        row, = theorem1_report(self.psi, [2.0])
        self.assertAlmostEqual(row.lhs, (2 - math.log(2)) / 2, places=14)
        self.assertAlmostEqual(row.rhs, 1.0, places=14)

    def test_rejects_x_at_most_one(self):
        with self.assertRaises(DomainError):
            theorem1_report(self.psi, [1.0, 2.0])

    def test_zero_instance(self):
        rows = theorem1_report(zero_instance(), [2.0, 5.0, 10.0])
        self.assertTrue(all(row.lhs == 0.0 and row.rhs == 0.0 for row in rows))

    def test_gap_band(self):
        for inst in (self.psi, self.mertens):
            rows = theorem1_report(inst, self.xs)
            self.assertTrue(theorem1_gap_report(rows, lo=10_000, label=inst.label.value).passed)

    def test_psi_decay(self):
        rows = theorem1_report(self.psi, self.xs)
        self.assertTrue(theorem1_decay_report(rows, 'PSI').passed)

    def test_mertens_plus_floor_decay(self):
        rows = theorem1_report(self.mertens, self.xs)
        self.assertTrue(theorem1_decay_report(rows, 'MERTENS_PLUS_FLOOR').passed)

    def test_series_view(self):
        rows = theorem1_report(self.psi, self.xs[:5])
        series = theorem1_series(rows, 'PSI')
        self.assertEqual(series.name, 'theorem1[PSI]')
        for row, record in zip(rows, series.records):
            self.assertAlmostEqual(record.remainder, row.gap, places=14)

    def test_prop_estim(self):
        reports = prop_estim_checks(self.psi, self.xs)
        self.assertEqual(len(reports), 3)
        for report in reports:
            self.assertTrue(report.passed, report.name)
            self.assertIn('sup=', report.notes)


@tag('slow')
class Theorem1MillionTests(SimpleTestCase):
    """Gap band and decay of both instances out to x = 10^6"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.table = build_arith_table(1_000_000, cap=1_000_000)
        cls.xs = [float(x) for x in np.geomspace(100, 1_000_000, 50)]

    def test_gap_band_and_decay(self):
        for label in ('PSI', 'MERTENS_PLUS_FLOOR'):
            with self.subTest(label=label):
                rows = theorem1_report(build_instance(label, self.table, CONSTANTS), self.xs)
                self.assertTrue(theorem1_gap_report(rows, lo=10_000, label=label).passed)
                self.assertTrue(theorem1_decay_report(rows, label).passed)


class ResidualSeriesTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.table = build_arith_table(20_000, cap=20_000)
        cls.psi = build_instance('PSI', cls.table, CONSTANTS)

    def test_weighted_inversion_at_one(self):
        series = weighted_inversion_residual(self.psi, [1.0, 10.0], self.table)
        self.assertEqual(series.at(1.0).raw, 0.0)
        self.assertTrue(math.isnan(series.at(1.0).normalized))

    def test_weighted_inversion_band(self):
        record = weighted_inversion_residual(self.psi, [10_000.0], self.table).at(10_000.0)
        self.assertLessEqual(abs(record.normalized), 0.2)

    def test_hypothesis_psi(self):
        record = hypothesis_series(self.psi, [10_000.0]).at(10_000.0)
        self.assertAlmostEqual(record.raw, math.lgamma(10_001), delta=1e-6)
        self.assertLess(abs(record.normalized), 0.01)

    def test_tail_constant_psi(self):
        record = tail_constant_series(self.psi, [20_000.0], CONSTANTS).at(20_000.0)
        self.assertAlmostEqual(record.main, -1 - CONSTANTS.gamma, places=15)
        self.assertLess(abs(record.remainder), 0.05)

    def test_doubling_psi(self):
        record = doubling_series(self.psi, [10_000.0]).at(10_000.0)
        self.assertAlmostEqual(record.main, 10_000 * math.log(2), places=9)
        self.assertLess(abs(record.normalized), 0.01)
