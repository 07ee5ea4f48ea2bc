#!/usr/bin/env python
"""Command-line entry point: simulations, scenario generation, predicate checks and trace verification."""
import os
import sys


def main():
    """Dispatch to the project's management commands."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Is it installed and on your PYTHONPATH? "
            "Install the project requirements first: pip install -r requirements.txt"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
