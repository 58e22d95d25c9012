#!/usr/bin/env python
"""
Run every verification suite in order with the project configuration
"""
import os
import sys

import django
from django.core.management import call_command
from django.core.management.base import CommandError

SUITES = (
    ('identities', {}),
    ('estimates', {}),
    ('tauberian', {'label': 'PSI'}),
    ('tauberian', {'label': 'MERTENS_PLUS_FLOOR'}),
    ('summatory', {}),
)


def main():
    """Run the suites, continuing past failures; exit with the worst status"""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tauberian_lab.settings')

    # Setup Django
    django.setup()

    status = 0
    for name, options in SUITES:
        print(f"Running {name} {options or ''}...")
        try:
            call_command(name, *sys.argv[1:], **options)
        except CommandError as e:
            print(f"{name} finished with errors: {e}")
            status = max(status, e.returncode)
    return status


if __name__ == '__main__':
    sys.exit(main())
