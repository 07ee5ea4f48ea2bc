"""
Verify a recorded trace against its run.

Usage:
    python manage.py verify trace.json
    python manage.py verify trace.json --k 2 --report verdicts.json

Runs validity, the termination bound, the approximation-graph properties and
the estimate bookkeeping; with --k also k-agreement, plus the agreement
structure when the run satisfies the k-sources predicate. Exits 1 if any
check fails.

The trace's decision_rule sets the earliest allowed decision and the
termination bound.
"""
from django.core.management.base import BaseCommand

from simulator.cli import usage_errors, violation, write_json_output
from simulator.serializers import VerdictSerializer
from simulator.traces import read_trace
from simulator.verifiers import run_all_checks


class Command(BaseCommand):
    help = 'Check a trace against the protocol properties'

    def add_arguments(self, parser):
        parser.add_argument('trace', help='Trace JSON file written by simulate')
        parser.add_argument('--k', type=int, default=None, help='Also check k-agreement for this k')
        parser.add_argument('--report', type=str, default=None, help='Write all verdicts as JSON here')

    def handle(self, *args, **options):
        with usage_errors():
            trace = read_trace(options['trace'])
            verdicts = run_all_checks(trace, options['k'])

        for verdict in verdicts:
            if verdict.passed:
                self.stdout.write(self.style.SUCCESS(f'PASS {verdict.suite} ({len(verdict.checks)} checks)'))
                continue
            self.stdout.write(self.style.ERROR(f'FAIL {verdict.suite}: {", ".join(verdict.failed_checks())}'))
            c = verdict.counterexample
            self.stdout.write(f'   {c.check} at p={c.process} r={c.round}: {c.detail}')

        if options['report']:
            write_json_output(self, VerdictSerializer(verdicts, many=True).data, options['report'])

        failed = [v.suite for v in verdicts if not v.passed]
        if failed:
            raise violation(f'{len(failed)} suite(s) failed: {", ".join(failed)}')
