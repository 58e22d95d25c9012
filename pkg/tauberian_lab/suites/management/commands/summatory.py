"""
Django management command printing M(x), psi(x), pi(x) and D(x) with timings
"""
from tauberian_lab.suites.suite_service import SuiteService

from ._base import SuiteCommand


class Command(SuiteCommand):
    help = 'Compute the summatory functions at x by the sublinear methods and check them against the sieve'
    suite = 'summatory'

    def add_arguments(self, parser):
        parser.add_argument('x', nargs='?', type=float, help='Evaluation point (default: max_x)')
        super().add_arguments(parser)

    def run_suite(self, config, options):
        x = options.get('x')
        x = config.max_x if x is None else x
        outcome = SuiteService.cmd_summatory(config, x)
        for value in outcome.values:
            line = f'{value.name}({x:g}) = {value.value:.15g}  [{value.seconds:.3f}s]'
            if value.oracle is not None:
                line += f'  sieve: {value.oracle:.15g}'
            self.stdout.write(line)
        return outcome
