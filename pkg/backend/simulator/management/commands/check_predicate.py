"""
Check the k-sources predicate on a scenario's run.

Usage:
    python manage.py check_predicate scenario.json           # report the smallest k
    python manage.py check_predicate scenario.json --k 2     # exit 1 unless it holds
    python manage.py check_predicate scenario.json --k 2 --cover

The report is printed as JSON. Without --k the scenario's own k is used when
it declares one, otherwise the smallest k for which the predicate holds.
"""
from django.core.management.base import BaseCommand

from predicates.serializers import PredicateReportSerializer, represent_cover
from predicates.services import min_k, p_srcs_holds, two_source_cover
from rounds.serializers import read_scenario
from simulator.cli import usage_errors, violation, write_json_output


class Command(BaseCommand):
    help = 'Check whether a run satisfies the k-sources predicate'

    def add_arguments(self, parser):
        parser.add_argument('scenario', help='Scenario JSON file')
        parser.add_argument('--k', type=int, default=None, help='Predicate parameter (default: smallest k)')
        parser.add_argument(
            '--cover',
            action='store_true',
            help='Also list the 2-source (or its absence) of every subset of size k + 1',
        )

    def handle(self, *args, **options):
        with usage_errors():
            run, _, declared_k = read_scenario(options['scenario'])
            smallest = min_k(run)
            k = options['k']
            if k is None:
                k = declared_k or smallest
            report = p_srcs_holds(run, k)
            data = dict(PredicateReportSerializer(report, context={'min_k': smallest}).data)
            if options['cover']:
                data['cover'] = represent_cover(two_source_cover(run, k))

        write_json_output(self, data, None)
        if not report.holds:
            raise violation(f'{k}-sources predicate violated by subset {list(report.violating_subset)}')
