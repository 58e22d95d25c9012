"""
Shared flags, configuration loading and exit-status handling for the suite commands
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from tauberian_lab.core.config import OUTPUT_FORMATS, RunConfig, load_run_config
from tauberian_lab.core.exceptions import TauberianLabError
from tauberian_lab.suites.suite_service import SuiteOutcome

logger = logging.getLogger(__name__)

# exit statuses
EXIT_FAILED_CHECKS = 1
EXIT_ERROR = 2

# flag dest -> RunConfig field
OVERRIDABLE = ('limit', 'samples', 'min_x', 'max_x', 'delta', 'tol_scale', 'format', 'out', 'seed', 'label')


class SuiteCommand(BaseCommand):
    suite = ''

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Path to a key=value config file (default: $TLAB_CONFIG, then config.ini)')
        parser.add_argument('--limit', type=int, help='Sieve limit N')
        parser.add_argument('--samples', type=int, help='Number of log-spaced sample points')
        parser.add_argument('--min-x', type=float, help='Smallest sample point')
        parser.add_argument('--max-x', type=float, help='Largest sample point')
        parser.add_argument('--delta', type=float, help='Grid step of the exponential profile')
        parser.add_argument('--tol-scale', type=float, help='Multiplier applied to the floating-point tolerances')
        parser.add_argument('--format', choices=OUTPUT_FORMATS, help='Output format')
        parser.add_argument('--out', help='Output directory')
        parser.add_argument('--seed', type=int, help='Seed for the random checks')
        parser.add_argument('--label', help='Tauberian instance: PSI, MERTENS_PLUS_FLOOR or CUSTOM')

    def build_config(self, options) -> RunConfig:
        config = load_run_config(options.get('config'))
        return config.with_overrides(**{key: options.get(key) for key in OVERRIDABLE})

    def run_suite(self, config: RunConfig, options) -> SuiteOutcome:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            config = self.build_config(options)
            self.stdout.write(f'Running {self.suite} suite (limit={config.limit}, out={config.out})...')
            outcome = self.run_suite(config, options)
        except (TauberianLabError, OSError) as e:
            self.stderr.write(self.style.ERROR(f'{self.suite} suite failed: {e}'))
            raise CommandError(f'{self.suite} suite failed: {e}', returncode=EXIT_ERROR)
        except Exception as e:
            logger.error(f"Failed to run {self.suite} suite: {e}", exc_info=True)
            self.stderr.write(self.style.ERROR(f'{self.suite} suite crashed: {type(e).__name__}: {e}'))
            raise CommandError(f'{self.suite} suite crashed: {e}', returncode=EXIT_ERROR)

        self.write_reports(outcome, options.get('verbosity', 1))
        failures = outcome.failures
        if failures:
            raise CommandError(f'{len(failures)} of {len(outcome.reports)} checks failed',
                               returncode=EXIT_FAILED_CHECKS)
        self.stdout.write(self.style.SUCCESS(
            f'All {len(outcome.reports)} checks passed; {len(outcome.files)} files written.'
        ))

    def write_reports(self, outcome: SuiteOutcome, verbosity: int) -> None:
        for report in outcome.reports:
            if report.passed and verbosity < 2:
                continue
            line = (f'{report.status.value:4} {report.name} {report.range_desc} '
                    f'max_violation={report.max_violation:.3g} (tol {report.tolerance:.3g})')
            if report.location is not None:
                line += f' at {report.location:g}'
            if report.notes:
                line += f' [{report.notes}]'
            self.stdout.write(self.style.SUCCESS(line) if report.passed else self.style.ERROR(line))
