"""
Django management command emitting the remainder series of the elementary estimates
"""
from tauberian_lab.suites.suite_service import SuiteService

from ._base import SuiteCommand


class Command(SuiteCommand):
    help = 'Write remainder series for the elementary, Mobius, Erdos-Karamata, U and divisor estimates'
    suite = 'estimates'

    def run_suite(self, config, options):
        return SuiteService.cmd_estimates(config)
