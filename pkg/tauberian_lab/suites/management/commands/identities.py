"""
Django management command running the exact-identity suite
"""
from tauberian_lab.suites.suite_service import SuiteService

from ._base import SuiteCommand


class Command(SuiteCommand):
    help = 'Verify the Dirichlet-convolution identities, sieve oracles and inversion round-trips up to --limit'
    suite = 'identities'

    def run_suite(self, config, options):
        return SuiteService.cmd_identities(config)
