"""
Generate a scenario file.

Usage:
    python manage.py generate lower-bound --n 6 --k 3 --out lb.json
    python manage.py generate random --n 5 --k 2 --seed 7 --prefix-len 4
    python manage.py generate arbitrary --n 4 --seed 1 --density 0.5
    python manage.py generate complete --n 3
    python manage.py generate two-roots

Kinds with a predicate guarantee write it as the scenario's k, and every
scenario gets the default proposals (process i proposes i + 1).
"""
from django.core.management.base import BaseCommand, CommandError

from predicates.exceptions import GenerationFailed
from predicates.generators import (
    GeneratorKind, gen_arbitrary, gen_complete, gen_lower_bound_run, gen_random_psrcs, gen_two_roots,
)
from rounds.serializers import ScenarioSerializer
from simulator.cli import EXIT_USAGE, default_proposals, usage_errors, violation, write_json_output

# Predicate parameter guaranteed by the fixed example run
TWO_ROOTS_K = 3


def _id_list(text):
    return [int(part) for part in text.split(',') if part != '']


class Command(BaseCommand):
    help = 'Generate a scenario (run, proposals and declared k) as JSON'

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=GeneratorKind.values, help='Generator to use')
        parser.add_argument('--n', type=int, default=None, help='Number of processes')
        parser.add_argument('--k', type=int, default=None, help='Predicate parameter (lower-bound, random)')
        parser.add_argument('--seed', type=int, default=0, help='Random seed (default: 0)')
        parser.add_argument('--prefix-len', type=int, default=3, help='Prefix rounds for random kinds (default: 3)')
        parser.add_argument('--density', type=float, default=0.3, help='Edge density for arbitrary (default: 0.3)')
        parser.add_argument('--loners', type=_id_list, default=None, help='Comma-separated loner ids (lower-bound)')
        parser.add_argument('--hub', type=int, default=None, help='Hub process (lower-bound)')
        parser.add_argument('--out', type=str, default=None, help='Write the scenario here instead of stdout')

    def handle(self, *args, **options):
        kind = options['kind']
        with usage_errors():
            try:
                run, k = self._generate(kind, options)
            except GenerationFailed as e:
                raise violation(str(e))

        data = ScenarioSerializer.represent_scenario(run, default_proposals(run.n), k)
        write_json_output(self, data, options['out'])
        if options['out']:
            self.stdout.write(self.style.SUCCESS(f'{kind} scenario with n={run.n} written to {options["out"]}'))

    def _require(self, options, *names):
        missing = [f'--{name}' for name in names if options[name] is None]
        if missing:
            raise CommandError(f'{options["kind"]} needs {" and ".join(missing)}', returncode=EXIT_USAGE)

    def _generate(self, kind, options):
        if kind == GeneratorKind.TWO_ROOTS:
            return gen_two_roots(), TWO_ROOTS_K
        if kind == GeneratorKind.COMPLETE:
            self._require(options, 'n')
            return gen_complete(options['n']), 1
        if kind == GeneratorKind.ARBITRARY:
            self._require(options, 'n')
            return gen_arbitrary(options['n'], options['seed'], options['prefix_len'], options['density']), None

        self._require(options, 'n', 'k')
        n, k = options['n'], options['k']
        if kind == GeneratorKind.LOWER_BOUND:
            return gen_lower_bound_run(n, k, options['loners'], options['hub']), k
        return gen_random_psrcs(n, k, options['seed'], options['prefix_len']), k
