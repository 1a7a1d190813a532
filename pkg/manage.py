#!/usr/bin/env python
"""
renormlab command line.

    python manage.py generate|classify|norm|operator|probe|game|report_diff [options]
    python manage.py test
"""
import os
import sys


def main():
    """Dispatch to a renormlab management command."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the project requirements "
            "(pip install -r requirements.txt) in the active environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
