"""
Run the k-set agreement protocol on a scenario file.

Usage:
    python manage.py simulate scenario.json
    python manage.py simulate scenario.json --proposals 3,1,2 --out trace.json
    python manage.py simulate scenario.json --horizon 20 --json
    python manage.py simulate scenario.json --decision-rule settled

Proposals come from --proposals, else from the scenario file, else process i
proposes i + 1. When the horizon is reached with undecided processes the
partial trace is still written and the command exits with status 1.
"""
from django.core.management.base import BaseCommand

from protocol.state import DecisionRule
from rounds.serializers import read_scenario
from simulator.cli import choose_proposals, usage_errors, violation, write_json_output
from simulator.engine import RoundExecutor
from simulator.exceptions import HorizonExceeded
from simulator.traces import write_trace
from simulator.verifiers import decision_summary


def summary_line(summary) -> str:
    values = summary['distinct_values']
    noun = 'value' if len(values) == 1 else 'values'
    line = f'{len(values)} distinct {noun}: {", ".join(str(v) for v in values)}'
    first, last = summary['first_decision_round'], summary['last_decision_round']
    if first is None:
        return line
    if summary['undecided']:
        return f'{line}, {summary["decided"]}/{summary["n"]} decided by round {last}'
    if first == last:
        return f'{line}, all decided round {first}'
    return f'{line}, all decided rounds {first}-{last}'


class Command(BaseCommand):
    help = 'Simulate the k-set agreement protocol on a scenario and write the trace'

    def add_arguments(self, parser):
        parser.add_argument('scenario', help='Scenario JSON file')
        parser.add_argument(
            '--proposals',
            type=str,
            default=None,
            help='Comma-separated proposal values in process order (overrides the file)',
        )
        parser.add_argument(
            '--horizon',
            type=int,
            default=None,
            help='Last round to simulate (default: L + 3n + KSET_HORIZON_SLACK)',
        )
        parser.add_argument(
            '--decision-rule',
            choices=DecisionRule.values,
            default=None,
            help='round-n decides from round n, settled from round 2n - 2 (default: KSET_DECISION_RULE)',
        )
        parser.add_argument('--out', type=str, default=None, help='Write the trace JSON here')
        parser.add_argument(
            '--json',
            action='store_true',
            help='Print the decision summary as JSON instead of one line',
        )

    def handle(self, *args, **options):
        with usage_errors():
            run, file_proposals, _ = read_scenario(options['scenario'])
            proposals = choose_proposals(run, options['proposals'], file_proposals)
            executor = RoundExecutor(run, proposals, options['horizon'], options['decision_rule'])

        try:
            trace = executor.run_to_completion()
        except HorizonExceeded as e:
            self._emit(e.trace, options)
            raise violation(str(e))
        self._emit(trace, options)

    def _emit(self, trace, options):
        if options['out']:
            with usage_errors():
                write_trace(options['out'], trace)
        summary = decision_summary(trace)
        if options['json']:
            write_json_output(self, summary, None)
        else:
            style = self.style.SUCCESS if trace.complete else self.style.WARNING
            self.stdout.write(style(summary_line(summary)))
        if options['out']:
            self.stdout.write(f'Trace of {trace.last_round} rounds written to {options["out"]}')
