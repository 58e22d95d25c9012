import math

from django.test import SimpleTestCase

from tauberian_lab.core.reports import RemainderSeries, Status, VerificationReport


class VerificationReportTests(SimpleTestCase):

    def test_status(self):
        self.assertIs(VerificationReport('a', '[1, 2]', 0.5, 1.0, 1.0).status, Status.PASS)
        self.assertIs(VerificationReport('a', '[1, 2]', 1.5, 1.0, 1.0).status, Status.FAIL)

    def test_nan_fails(self):
        report = VerificationReport.from_violations('a', [1.0, 2.0, 3.0], [0.0, math.nan, 5.0], tolerance=10.0)
        self.assertFalse(report.passed)
        self.assertEqual(report.location, 2.0)

    def test_worst_violation(self):
        report = VerificationReport.from_violations('a', [1.0, 2.0, 3.0], [0.1, 0.3, 0.2], tolerance=0.25)
        self.assertEqual(report.max_violation, 0.3)
        self.assertEqual(report.location, 2.0)
        self.assertEqual(report.range_desc, '[1, 3]')
        self.assertFalse(report.passed)

    def test_empty(self):
        report = VerificationReport.from_violations('a', [], [], tolerance=0.0)
        self.assertTrue(report.passed)
        self.assertIsNone(report.location)
        self.assertEqual(report.range_desc, 'empty')


class RemainderSeriesTests(SimpleTestCase):

    def test_append(self):
        series = RemainderSeries('s', '1/x')
        record = series.append(10.0, 3.0, 2.0, 0.5)
        self.assertEqual(record.remainder, 1.0)
        self.assertEqual(record.normalized, 2.0)
        self.assertEqual(len(series), 1)

    def test_x_must_increase(self):
        series = RemainderSeries('s', '1')
        series.append(2.0, 1.0, 1.0, 1.0)
        with self.assertRaises(ValueError):
            series.append(2.0, 1.0, 1.0, 1.0)

    def test_zero_scale(self):
        record = RemainderSeries('s', '1').append(2.0, 1.0, 0.0, 0.0)
        self.assertTrue(math.isnan(record.normalized))

    def test_growth_ratio(self):
        xs = [1.0, 10.0, 100.0, 1000.0]
        flat = RemainderSeries.build('flat', '1', xs, [1.0] * 4, [0.0] * 4, lambda x: 1.0)
        self.assertEqual(flat.growth_ratio(), 1.0)
        self.assertFalse(flat.has_growth_trend())
        growing = RemainderSeries.build('grow', '1', xs, xs, [0.0] * 4, lambda x: 1.0)
        self.assertEqual(growing.growth_ratio(), 10.0)
        self.assertFalse(growing.trend_report().passed)

    def test_short_span_has_no_trend(self):
        series = RemainderSeries.build('s', '1', [100.0, 200.0], [1.0, 50.0], [0.0, 0.0], lambda x: 1.0)
        self.assertEqual(series.growth_ratio(), 0.0)
