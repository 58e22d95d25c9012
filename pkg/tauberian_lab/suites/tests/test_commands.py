"""
End-to-end runs of the suite management commands on small limits
"""
import csv
import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from tauberian_lab.suites.management.commands._base import EXIT_ERROR
from tauberian_lab.suites.writers import REPORT_COLUMNS

# small term counts keep the constants cheap while staying within their tolerances
TEST_CONFIG = """
limit = 2000
samples = 12
min_x = 100
max_x = 2000
delta = 1e-3
format = csv
seed = 20240601
label = PSI
table_cap = 1000000
workers = 2
gamma_terms = 100000
c_terms = 100000
"""


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)
        self.config = self.root / 'test.ini'
        self.config.write_text(TEST_CONFIG, encoding='utf-8')
        self.out = self.root / 'out'

    def run_command(self, name, *args, **options):
        """Run a command, returning (returncode, stdout)"""
        stdout, stderr = StringIO(), StringIO()
        options.setdefault('config', str(self.config))
        options.setdefault('out', str(self.out))
        try:
            call_command(name, *args, stdout=stdout, stderr=stderr, **options)
        except CommandError as e:
            return e.returncode, stdout.getvalue()
        return 0, stdout.getvalue()

    def read_reports(self, suite):
        with (self.out / f'{suite}_reports.csv').open(encoding='utf-8', newline='') as handle:
            return list(csv.DictReader(handle))


class IdentitiesCommandTests(CommandTestCase):

    def test_limit_one(self):
        code, stdout = self.run_command('identities', limit=1)
        self.assertEqual(code, 0, stdout)
        self.assertTrue((self.out / 'identities_reports.csv').exists())

    def test_passes(self):
        code, stdout = self.run_command('identities')
        self.assertEqual(code, 0, stdout)
        self.assertIn('checks passed', stdout)
        rows = self.read_reports('identities')
        self.assertTrue(rows)
        self.assertEqual({row['status'] for row in rows}, {'PASS'})

    def test_deterministic_output(self):
        self.run_command('identities', out=str(self.root / 'a'))
        self.run_command('identities', out=str(self.root / 'b'))
        first = (self.root / 'a' / 'identities_reports.csv').read_bytes()
        second = (self.root / 'b' / 'identities_reports.csv').read_bytes()
        self.assertEqual(first, second)

    def test_json_format(self):
        code, _ = self.run_command('identities', format='json')
        self.assertEqual(code, 0)
        document = json.loads((self.out / 'identities_reports.json').read_text(encoding='utf-8'))
        self.assertEqual(list(document), list(REPORT_COLUMNS))
        self.assertEqual(set(document['status']), {'PASS'})

    def test_unwritable_output(self):
        blocker = self.root / 'file'
        blocker.write_text('', encoding='utf-8')
        code, _ = self.run_command('identities', out=str(blocker / 'out'))
        self.assertEqual(code, EXIT_ERROR)

    def test_invalid_limit(self):
        code, _ = self.run_command('identities', limit=0)
        self.assertEqual(code, EXIT_ERROR)


class SummatoryCommandTests(CommandTestCase):

    def test_values_at_1000(self):
        code, stdout = self.run_command('summatory', 1000, max_x=1000.0)
        self.assertEqual(code, 0, stdout)
        self.assertIn('M(1000) = 2 ', stdout)
        self.assertIn('D(1000) = 7069 ', stdout)
        self.assertTrue((self.out / 'summatory_reports.csv').exists())

    def test_below_one(self):
        code, _ = self.run_command('summatory', 0.5)
        self.assertEqual(code, EXIT_ERROR)


@tag('slow')
class SeriesCommandTests(CommandTestCase):
    """Estimates and Tauberian suites at the shipped defaults pass every check"""

    def setUp(self):
        super().setUp()
        self.config.write_text('', encoding='utf-8')

    def assertAllPass(self, suite):
        rows = self.read_reports(suite)
        self.assertTrue(rows)
        failed = [row['name'] for row in rows if row['status'] != 'PASS']
        self.assertEqual(failed, [])
        return {row['name']: row['status'] for row in rows}

    def test_estimates(self):
        code, stdout = self.run_command('estimates')
        self.assertEqual(code, 0, stdout)
        for stem in ('S1', 'S3B', 'MU1', 'MU3', 'EK', 'U', 'divisor', 'reports'):
            self.assertTrue((self.out / f'estimates_{stem}.csv').exists(), stem)
        names = self.assertAllPass('estimates')
        for name in ('gamma_two_formulas', 'gamma_partial_sum', 'c_stable', 'c_integral_form'):
            self.assertIn(name, names)

    def test_tauberian_psi(self):
        code, stdout = self.run_command('tauberian')
        self.assertEqual(code, 0, stdout)
        self.assertTrue((self.out / 'tauberian_PSI_theorem1_PSI.csv').exists())
        names = self.assertAllPass('tauberian_PSI')
        for name in ('k_non_decreasing[M=1]', 's_bounds[PSI]', 'isoperimetric[fixtures]', 'lemma_E1[fixtures]'):
            self.assertIn(name, names)

    def test_tauberian_mertens_plus_floor(self):
        code, stdout = self.run_command('tauberian', label='MERTENS_PLUS_FLOOR')
        self.assertEqual(code, 0, stdout)
        self.assertTrue((self.out / 'tauberian_MERTENS_PLUS_FLOOR_theorem1_MERTENS_PLUS_FLOOR.csv').exists())
        names = self.assertAllPass('tauberian_MERTENS_PLUS_FLOOR')
        self.assertIn('s_bounds[MERTENS_PLUS_FLOOR]', names)

    def test_tauberian_unknown_label(self):
        code, _ = self.run_command('tauberian', label='ZETA')
        self.assertEqual(code, EXIT_ERROR)


class UnexpectedErrorTests(CommandTestCase):

    @patch('tauberian_lab.suites.management.commands.identities.SuiteService.cmd_identities',
           side_effect=ZeroDivisionError('float division by zero'))
    def test_unexpected_exception_exits_with_error(self, _):
        with self.assertLogs('tauberian_lab.suites.management.commands._base', 'ERROR') as logs:
            code, _ = self.run_command('identities')
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn('float division by zero', logs.output[0])
