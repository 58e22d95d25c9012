"""
Django management command running the Tauberian harness for one instance
"""
from tauberian_lab.suites.suite_service import SuiteService

from ._base import SuiteCommand


class Command(SuiteCommand):
    help = 'Run the integral-inequality harness and window checks for the instance named by --label'
    suite = 'tauberian'

    def run_suite(self, config, options):
        return SuiteService.cmd_tauberian(config)
