import csv
import json
import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from tauberian_lab.core.exceptions import UsageError
from tauberian_lab.core.reports import RemainderSeries, VerificationReport
from tauberian_lab.suites.writers import (
    REPORT_COLUMNS, SERIES_COLUMNS, file_stem, format_number, write_reports, write_series, write_table,
)


def sample_series() -> RemainderSeries:
    series = RemainderSeries('S1', '1/x')
    series.append(2.0, 1.5, 1.270362845461478, 0.5)
    series.append(10.0, 2.928968253968254, 2.879800757895474, 0.1)
    series.append(20.0, 1.0, 1.0, 0.0)
    return series


class FormatTests(SimpleTestCase):

    def test_format_number(self):
        self.assertEqual(format_number(None), '')
        self.assertEqual(format_number(math.nan), 'nan')
        self.assertEqual(format_number(-math.inf), '-inf')
        self.assertEqual(format_number(2.0), '2')
        self.assertEqual(format_number(0.1 + 0.2), '0.3')
        self.assertEqual(format_number(1 / 3), '0.333333333333333')

    def test_file_stem(self):
        self.assertEqual(file_stem('tauberian_PSI', 'theorem1[PSI]'), 'tauberian_PSI_theorem1_PSI')
        self.assertEqual(file_stem('estimates', 'S1'), 'estimates_S1')


class WriterTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name) / 'nested' / 'out'

    def test_series_csv(self):
        path = write_series(self.out, 'estimates', sample_series(), 'csv')
        self.assertEqual(path.name, 'estimates_S1.csv')
        with path.open(encoding='utf-8', newline='') as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(tuple(rows[0]), SERIES_COLUMNS)
        self.assertEqual(rows[1][0], '2')
        self.assertEqual(rows[3][4], 'nan')
        self.assertEqual(rows[3][5], '1/x')
        self.assertNotIn('\r', path.read_text(encoding='utf-8'))

    def test_series_json(self):
        path = write_series(self.out, 'estimates', sample_series(), 'json')
        document = json.loads(path.read_text(encoding='utf-8'))
        self.assertEqual(list(document), list(SERIES_COLUMNS))
        self.assertEqual(document['x'], [2.0, 10.0, 20.0])
        self.assertIsNone(document['normalized'][2])

    def test_reports(self):
        reports = [
            VerificationReport('mu*1=e', '[1, 100]', 0.0, None, 0.0),
            VerificationReport('selberg', '[1, 100]', 2.5e-9, 97.0, 1e-9),
        ]
        path = write_reports(self.out, 'identities', reports, 'csv')
        self.assertEqual(path.name, 'identities_reports.csv')
        with path.open(encoding='utf-8', newline='') as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(tuple(rows[0]), REPORT_COLUMNS)
        self.assertEqual(rows[1], ['mu*1=e', '[1, 100]', '0', '', 'PASS'])
        self.assertEqual(rows[2], ['selberg', '[1, 100]', '2.5e-09', '97', 'FAIL'])

    def test_deterministic(self):
        first = write_series(Path(self.tmp.name) / 'a', 'estimates', sample_series(), 'json').read_bytes()
        second = write_series(Path(self.tmp.name) / 'b', 'estimates', sample_series(), 'json').read_bytes()
        self.assertEqual(first, second)

    def test_unknown_format(self):
        with self.assertRaises(UsageError):
            write_table(self.out, 'x', SERIES_COLUMNS, [], 'xlsx')
