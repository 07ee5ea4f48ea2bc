"""
Export a round skeleton, the stable skeleton or an approximation graph as DOT.

Usage:
    python manage.py export_dot scenario.json --round 3
    python manage.py export_dot trace.json --stable --out stable.dot
    python manage.py export_dot trace.json --approx p0@4 --self-loops

The input may be a scenario or a trace file; --approx needs a trace.
"""
import re

from django.core.management.base import BaseCommand, CommandError

from common.utils.jsonio import read_json
from graphkit.dot import render_dot
from rounds.serializers import parse_scenario
from rounds.services import SkeletonTracker
from simulator.cli import EXIT_USAGE, usage_errors, write_output
from simulator.traces import load_trace

APPROX_PATTERN = re.compile(r'^p?(\d+)@(\d+)$')


class Command(BaseCommand):
    help = 'Render a skeleton or approximation graph in Graphviz DOT'

    def add_arguments(self, parser):
        parser.add_argument('source', help='Scenario or trace JSON file')
        target = parser.add_mutually_exclusive_group(required=True)
        target.add_argument('--round', type=int, dest='round_number', help='Skeleton of rounds 1..r')
        target.add_argument('--stable', action='store_true', help='Stable skeleton of the run')
        target.add_argument('--approx', type=str, help='Approximation graph of process p after round r, as p@r')
        parser.add_argument('--self-loops', action='store_true', default=None, help='Draw self-loops')
        parser.add_argument('--out', type=str, default=None, help='Write the DOT source here instead of stdout')

    def handle(self, *args, **options):
        with usage_errors():
            data = read_json(options['source'])
            is_trace = isinstance(data, dict) and 'rounds' in data
            trace = load_trace(data) if is_trace else None
            run = trace.run if is_trace else parse_scenario(data)[0]

            if options['approx']:
                if trace is None:
                    raise CommandError('--approx needs a trace file', returncode=EXIT_USAGE)
                p, r = self._parse_approx(options['approx'])
                graph = trace.state(p, r).graph
                source = render_dot(
                    graph.vertices, graph.labels, labels=graph.labels,
                    include_self_loops=options['self_loops'], name=f'approx_p{p}_r{r}',
                )
            else:
                tracker = SkeletonTracker(run)
                skeleton = tracker.stable if options['stable'] else tracker.skeleton(options['round_number'])
                name = 'stable_skeleton' if skeleton.is_stable else f'skeleton_r{skeleton.as_of_round}'
                source = render_dot(
                    range(run.n), skeleton.edges, include_self_loops=options['self_loops'], name=name,
                )

        write_output(self, source, options['out'])

    @staticmethod
    def _parse_approx(text):
        match = APPROX_PATTERN.match(text)
        if match is None:
            raise CommandError(f'--approx expects p@r, e.g. p0@3, got {text!r}', returncode=EXIT_USAGE)
        return int(match.group(1)), int(match.group(2))
