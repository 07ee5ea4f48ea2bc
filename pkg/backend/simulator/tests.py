import json
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from common.utils.jsonio import dumps, read_json, write_json
from predicates.generators import (
    gen_arbitrary, gen_complete, gen_lower_bound_run, gen_random_psrcs, gen_two_roots,
)
from predicates.services import min_k, p_srcs_holds
from protocol.state import Decision, DecisionRule, DecisionSource
from rounds.exceptions import RoundOutOfRange, UnknownProcess
from rounds.graphs import RoundGraph, RunSpec
from rounds.serializers import ScenarioSerializer
from rounds.services import complete_run, stable_skeleton
from .cli import EXIT_USAGE, EXIT_VIOLATION
from .engine import RoundExecutor, default_horizon, execute
from .exceptions import HorizonExceeded, InvalidProposals, PredicateNotSatisfied, TraceFormatError
from .traces import dump_trace, load_trace, read_trace, write_trace
from .verifiers import (
    CheckId, check_k_agreement, check_termination_bound, check_validity, corrupt_label,
    decision_summary, run_all_checks, verify_agreement_structure, verify_approximation,
    verify_estimates,
)


def _default_proposals(n):
    return {p: p + 1 for p in range(n)}


def _late_relay_run():
    """0 -> 1 -> 2 for three rounds, then only 1 -> 2."""
    chain = RoundGraph.from_edges(3, [(0, 1), (1, 2)])
    return RunSpec(n=3, prefix=(chain, chain, chain), tail=RoundGraph.from_edges(3, [(1, 2)]))


def _values(trace):
    return sorted({d.value for d in trace.decisions.values()})


class EngineTests(SimpleTestCase):

    def test_complete_graph_decides_minimum_at_round_n(self):
        trace = execute(complete_run(3), {0: 3, 1: 1, 2: 2})
        self.assertTrue(trace.complete)
        self.assertEqual(trace.last_round, 3)
        for p in range(3):
            self.assertEqual(trace.decisions[p], Decision(value=1, round=3, source=DecisionSource.SELF.value))

    def test_lower_bound_run_decides_k_values(self):
        trace = execute(gen_lower_bound_run(6, 3), _default_proposals(6))
        self.assertEqual(trace.decisions[0], Decision(1, 6, DecisionSource.SELF.value))
        self.assertEqual(trace.decisions[1], Decision(2, 6, DecisionSource.SELF.value))
        self.assertEqual(trace.decisions[2], Decision(3, 6, DecisionSource.SELF.value))
        for p in (3, 4, 5):
            self.assertEqual(trace.decisions[p], Decision(3, 7, DecisionSource.RELAY.value))
        self.assertEqual(_values(trace), [1, 2, 3])

    def test_single_process_decides_in_round_one(self):
        trace = execute(complete_run(1), {0: 5})
        self.assertEqual(trace.decisions, {0: Decision(5, 1, DecisionSource.SELF.value)})

    def test_horizon_exceeded_keeps_partial_trace(self):
        with self.assertRaises(HorizonExceeded) as ctx:
            execute(complete_run(3), _default_proposals(3), horizon=2)
        self.assertEqual(ctx.exception.undecided, (0, 1, 2))
        self.assertEqual(ctx.exception.trace.last_round, 2)
        self.assertFalse(ctx.exception.trace.complete)

    def test_invalid_proposals(self):
        run = complete_run(3)
        with self.assertRaises(InvalidProposals):
            execute(run, {0: 1, 1: 2})
        with self.assertRaises(InvalidProposals):
            execute(run, {0: 1, 1: 2, 2: -1})
        with self.assertRaises(InvalidProposals):
            execute(run, {0: 1, 1: True, 2: 3})

    def test_horizon_must_be_positive(self):
        with self.assertRaises(RoundOutOfRange):
            RoundExecutor(complete_run(2), _default_proposals(2), horizon=0)

    def test_default_horizon(self):
        with self.settings(KSET_HORIZON_SLACK=1):
            self.assertEqual(default_horizon(gen_two_roots()), 3 + 18 + 1)
            self.assertEqual(default_horizon(complete_run(4)), 13)

    def test_step_by_step_matches_execute(self):
        run = gen_two_roots()
        executor = RoundExecutor(run, _default_proposals(6))
        while not executor.trace.complete:
            executor.step()
        self.assertEqual(dump_trace(executor.trace), dump_trace(execute(run, _default_proposals(6))))

    def test_record_lookups(self):
        trace = execute(complete_run(3), {0: 3, 1: 1, 2: 2})
        record = trace.record(1)
        self.assertEqual(sorted(record.inbox(0)), [0, 1, 2])
        self.assertEqual(record.message(1, 0).x, 1)
        self.assertEqual(trace.state(0, 0).x, 3)
        self.assertEqual(trace.state(0, 1).x, 1)
        with self.assertRaises(RoundOutOfRange):
            trace.record(4)
        with self.assertRaises(UnknownProcess):
            trace.state(3, 1)

    def test_message_lookup_outside_round_graph(self):
        trace = execute(gen_lower_bound_run(4, 2), _default_proposals(4))
        self.assertIsNone(trace.record(1).message(0, 1))
        self.assertEqual(sorted(trace.record(1).inbox(2)), [1, 2])


class CheckTests(SimpleTestCase):

    def test_complete_trace_passes_everything(self):
        trace = execute(complete_run(3), {0: 3, 1: 1, 2: 2})
        verdicts = run_all_checks(trace, 1)
        self.assertEqual(
            [v.suite for v in verdicts],
            ['validity', 'termination_bound', 'approximation', 'estimates', 'k_agreement', 'agreement_structure'],
        )
        for verdict in verdicts:
            self.assertTrue(verdict.passed, verdict.counterexample)

    def test_forged_decision_is_caught(self):
        trace = execute(complete_run(3), {0: 3, 1: 1, 2: 2})
        trace.decisions[0] = Decision(99, 3, DecisionSource.SELF.value)
        verdict = check_validity(trace)
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.counterexample.process, 0)
        self.assertEqual(verdict.counterexample.round, 3)
        self.assertIn(CheckId.SINGLE_DECISION.value, verify_estimates(trace).failed_checks())

    def test_k_agreement_on_lower_bound(self):
        trace = execute(gen_lower_bound_run(6, 3), _default_proposals(6))
        self.assertTrue(check_k_agreement(trace, 3).passed)
        verdict = check_k_agreement(trace, 2)
        self.assertFalse(verdict.passed)
        self.assertEqual(verdict.facts['distinct_values'], [1, 2, 3])

    def test_agreement_structure_on_lower_bound(self):
        trace = execute(gen_lower_bound_run(6, 3), _default_proposals(6))
        verdict = verify_agreement_structure(trace, 3)
        self.assertTrue(verdict.passed, verdict.counterexample)
        self.assertEqual(verdict.facts['root_components'], [[0], [1], [2]])
        with self.assertRaises(PredicateNotSatisfied):
            verify_agreement_structure(trace, 2)

    def test_structure_skipped_outside_predicate(self):
        trace = execute(gen_lower_bound_run(6, 3), _default_proposals(6))
        verdicts = run_all_checks(trace, 2)
        self.assertNotIn('agreement_structure', [v.suite for v in verdicts])
        self.assertEqual([v.suite for v in verdicts if not v.passed], ['k_agreement'])

    def test_relay_without_own_decision_is_flagged(self):
        trace = execute(gen_lower_bound_run(6, 3), _default_proposals(6))
        trace.decisions[3] = Decision(3, 6, DecisionSource.RELAY.value)
        verdict = verify_agreement_structure(trace, 3)
        self.assertEqual(verdict.failed_checks(), [CheckId.DECISION_PROVENANCE.value])

    def test_termination_uses_last_skeleton_change(self):
        trace = execute(_late_relay_run(), _default_proposals(3))
        self.assertEqual(trace.decisions[0], Decision(1, 3, DecisionSource.SELF.value))
        self.assertEqual(trace.decisions[1], Decision(1, 6, DecisionSource.SELF.value))
        self.assertEqual(trace.decisions[2], Decision(1, 7, DecisionSource.RELAY.value))

        verdict = check_termination_bound(trace)
        self.assertTrue(verdict.passed)
        self.assertEqual(verdict.facts, {'r_star': 4, 'window_round': 1, 'decision_floor': 3, 'bound': 9})
        # Counting from the first constant window alone would give round 6.
        self.assertGreater(trace.decisions[2].round, verdict.facts['window_round'] + 2 * 3 - 1)

    def test_late_relay_run_passes_remaining_checks(self):
        trace = execute(_late_relay_run(), _default_proposals(3))
        for verdict in run_all_checks(trace):
            self.assertTrue(verdict.passed, verdict.counterexample)

    def test_undecided_process_fails_termination(self):
        with self.assertRaises(HorizonExceeded) as ctx:
            execute(complete_run(3), _default_proposals(3), horizon=2)
        verdict = check_termination_bound(ctx.exception.trace)
        self.assertFalse(verdict.passed)
        self.assertIsNone(verdict.counterexample.round)

    def test_corrupted_label_breaks_window(self):
        trace = execute(gen_two_roots(), _default_proposals(6))
        for seed in range(20):
            with self.subTest(seed=seed):
                verdict = verify_approximation(corrupt_label(trace, seed))
                self.assertIn(CheckId.LABEL_WINDOW.value, verdict.failed_checks())
        self.assertTrue(verify_approximation(trace).passed)

    def test_decision_summary(self):
        trace = execute(gen_lower_bound_run(6, 3), _default_proposals(6))
        self.assertEqual(decision_summary(trace), {
            'n': 6,
            'rounds_simulated': 7,
            'decided': 6,
            'undecided': [],
            'distinct_values': [1, 2, 3],
            'value_histogram': {'1': 1, '2': 1, '3': 4},
            'round_histogram': {'6': 3, '7': 3},
            'first_decision_round': 6,
            'last_decision_round': 7,
        })


class AcceptanceSweepTests(SimpleTestCase):

    def _assert_all_pass(self, verdicts):
        for verdict in verdicts:
            self.assertTrue(verdict.passed, f'{verdict.suite}: {verdict.counterexample}')

    def test_random_k_sources_runs(self):
        # Agreement is only asserted under the settled rule; see DecisionRuleTests.
        for seed in range(500):
            n = 4 + seed % 5
            k = 1 + (seed // 5) % (n - 1)
            with self.subTest(n=n, k=k, seed=seed):
                run = gen_random_psrcs(n, k, seed)
                trace = execute(run, _default_proposals(n))
                self.assertTrue(trace.complete)
                self._assert_all_pass(run_all_checks(trace))

                settled = execute(run, _default_proposals(n), rule=DecisionRule.SETTLED)
                self.assertTrue(settled.complete)
                verdicts = run_all_checks(settled, k)
                self.assertEqual(verdicts[-1].suite, 'agreement_structure')
                self._assert_all_pass(verdicts)

    def test_arbitrary_runs_and_mutations(self):
        for seed in range(500):
            n = 3 + seed % 6
            with self.subTest(n=n, seed=seed):
                run = gen_arbitrary(n, seed)
                proposals = {p: (7 * p + seed) % n for p in range(n)}
                trace = execute(run, proposals)
                self._assert_all_pass(run_all_checks(trace))
                settled = execute(run, proposals, rule=DecisionRule.SETTLED)
                self._assert_all_pass(run_all_checks(settled, min_k(run)))
                mutated = verify_approximation(corrupt_label(trace, seed))
                self.assertIn(CheckId.LABEL_WINDOW.value, mutated.failed_checks())

    def test_lower_bound_is_tight(self):
        for n in range(3, 9):
            for k in range(2, n):
                with self.subTest(n=n, k=k):
                    trace = execute(gen_lower_bound_run(n, k), _default_proposals(n))
                    verdicts = run_all_checks(trace, k)
                    self._assert_all_pass(verdicts)
                    self.assertEqual(len(verdicts[-1].facts['root_components']), k)
                    self.assertEqual(len(_values(trace)), k)
                    self.assertFalse(check_k_agreement(trace, k - 1).passed)

    def test_complete_graphs_reach_consensus(self):
        for n in range(2, 9):
            with self.subTest(n=n):
                trace = execute(gen_complete(n), {p: n - p for p in range(n)})
                self.assertEqual(trace.last_round, n)
                for decision in trace.decisions.values():
                    self.assertEqual(decision, Decision(1, n, DecisionSource.SELF.value))


class DecisionRuleTests(SimpleTestCase):
    """
    gen_random_psrcs(4, 1, 0) satisfies the 1-sources predicate with the
    single root component {1, 3}, yet p2 decides 1 at round 4 on an
    approximation closed by edges that already left the skeleton, while the
    root can only ever decide 2.
    """

    def setUp(self):
        self.run = gen_random_psrcs(4, 1, 0)
        self.proposals = _default_proposals(4)

    def test_run_has_one_root_component(self):
        stable, _ = stable_skeleton(self.run)
        self.assertEqual(
            stable.edges - {(p, p) for p in range(4)},
            {(0, 2), (1, 3), (3, 0), (3, 1), (3, 2)},
        )
        self.assertTrue(p_srcs_holds(self.run, 1).holds)

    def test_round_n_rule_decides_two_values(self):
        trace = execute(self.run, self.proposals)
        self.assertEqual(trace.decisions, {
            0: Decision(2, 6, DecisionSource.RELAY.value),
            1: Decision(2, 5, DecisionSource.SELF.value),
            2: Decision(1, 4, DecisionSource.SELF.value),
            3: Decision(2, 5, DecisionSource.SELF.value),
        })
        graph = trace.state(2, 4).graph
        self.assertEqual(graph.label(1, 0), 3)
        self.assertEqual(graph.label(2, 3), 1)

        for verdict in run_all_checks(trace):
            self.assertTrue(verdict.passed, verdict.counterexample)
        self.assertFalse(check_k_agreement(trace, 1).passed)
        self.assertEqual(
            verify_agreement_structure(trace, 1).failed_checks(), [CheckId.ROOT_CORRESPONDENCE.value],
        )

    def test_settled_rule_decides_one_value(self):
        trace = execute(self.run, self.proposals, rule=DecisionRule.SETTLED)
        self.assertEqual(trace.rule, DecisionRule.SETTLED.value)
        self.assertEqual(_values(trace), [2])
        self.assertTrue(all(d.round >= 6 for d in trace.decisions.values()))
        for verdict in run_all_checks(trace, 1):
            self.assertTrue(verdict.passed, f'{verdict.suite}: {verdict.counterexample}')

    def test_settled_rule_on_complete_graphs(self):
        for n in range(1, 7):
            with self.subTest(n=n):
                trace = execute(gen_complete(n), {p: n - p for p in range(n)}, rule=DecisionRule.SETTLED)
                floor = max(n, 2 * n - 2)
                self.assertEqual(trace.last_round, floor)
                for decision in trace.decisions.values():
                    self.assertEqual(decision, Decision(1, floor, DecisionSource.SELF.value))
                verdict = check_termination_bound(trace)
                self.assertTrue(verdict.passed)
                self.assertEqual(verdict.facts['decision_floor'], floor)

    def test_rule_from_settings(self):
        with self.settings(KSET_DECISION_RULE='settled'):
            trace = execute(complete_run(3), _default_proposals(3))
        self.assertEqual(trace.rule, DecisionRule.SETTLED.value)
        self.assertEqual(trace.decisions[0], Decision(1, 4, DecisionSource.SELF.value))

    def test_early_decision_measured_against_rule(self):
        trace = execute(complete_run(3), _default_proposals(3))
        self.assertTrue(verify_estimates(trace).passed)
        trace.rule = DecisionRule.SETTLED.value
        self.assertEqual(verify_estimates(trace).failed_checks(), [CheckId.NO_EARLY_DECISION.value])


class TraceFileTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def _path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_round_trip(self):
        trace = execute(gen_two_roots(), _default_proposals(6))
        loaded = load_trace(json.loads(dumps(dump_trace(trace))))
        self.assertEqual(dump_trace(loaded), dump_trace(trace))
        self.assertEqual(loaded.decisions, trace.decisions)
        self.assertEqual(loaded.record(2).sent, trace.record(2).sent)
        for verdict in run_all_checks(loaded, 3):
            self.assertTrue(verdict.passed, verdict.counterexample)

    def test_identical_inputs_give_identical_files(self):
        run = gen_random_psrcs(6, 2, seed=11)
        write_trace(self._path('a.json'), execute(run, _default_proposals(6)))
        write_trace(self._path('b.json'), execute(run, _default_proposals(6)))
        with open(self._path('a.json'), 'rb') as a, open(self._path('b.json'), 'rb') as b:
            self.assertEqual(a.read(), b.read())
        self.assertTrue(read_trace(self._path('a.json')).complete)

    def test_deliveries_must_match_run(self):
        data = json.loads(dumps(dump_trace(execute(complete_run(3), _default_proposals(3)))))
        data['rounds'][0]['delivered'].pop()
        with self.assertRaises(TraceFormatError):
            load_trace(data)

    def test_rounds_must_be_consecutive(self):
        data = json.loads(dumps(dump_trace(execute(complete_run(3), _default_proposals(3)))))
        data['rounds'][1]['round'] = 3
        with self.assertRaises(TraceFormatError) as ctx:
            load_trace(data)
        self.assertIn('rounds', ctx.exception.errors)

    def test_complete_flag_must_match_decisions(self):
        data = json.loads(dumps(dump_trace(execute(complete_run(3), _default_proposals(3)))))
        del data['decisions']['2']
        with self.assertRaises(TraceFormatError):
            load_trace(data)

    def test_decision_rule_is_recorded(self):
        trace = execute(complete_run(3), _default_proposals(3), rule=DecisionRule.SETTLED)
        data = json.loads(dumps(dump_trace(trace)))
        self.assertEqual(data['decision_rule'], 'settled')
        self.assertEqual(load_trace(data).rule, 'settled')
        del data['decision_rule']
        self.assertEqual(load_trace(data).rule, DecisionRule.ROUND_N.value)
        data['decision_rule'] = 'eventually'
        with self.assertRaises(TraceFormatError):
            load_trace(data)

    def test_state_must_stay_inside_the_system(self):
        data = json.loads(dumps(dump_trace(execute(complete_run(3), _default_proposals(3)))))
        graph = data['rounds'][2]['states'][0]['graph']
        graph['vertices'].append(9)
        graph['edges'] += [[0, 9, 3], [9, 0, 3]]
        with self.assertRaises(TraceFormatError) as ctx:
            load_trace(data)
        self.assertIn('rounds', ctx.exception.errors)

    def test_missing_run(self):
        with self.assertRaises(TraceFormatError) as ctx:
            load_trace({'proposals': {}, 'horizon': 1, 'complete': False, 'rounds': [], 'decisions': {}})
        self.assertIn('run', ctx.exception.errors)


class CommandTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def _path(self, name):
        return os.path.join(self.tmp.name, name)

    def _call(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO(), no_color=True)
        return out.getvalue()

    def _fails(self, returncode, *args):
        with self.assertRaises(CommandError) as ctx:
            self._call(*args)
        self.assertEqual(ctx.exception.returncode, returncode)
        return ctx.exception

    def _scenario(self, name, run, proposals=None, k=None):
        path = self._path(name)
        write_json(path, ScenarioSerializer.represent_scenario(run, proposals, k))
        return path

    def test_generate_simulate_verify_pipeline(self):
        scenario = self._path('lb.json')
        trace = self._path('trace.json')
        self._call('generate', 'lower-bound', '--n', '6', '--k', '3', '--out', scenario)
        data = read_json(scenario)
        self.assertEqual((data['n'], data['k']), (6, 3))
        self.assertEqual(data['proposals'], {str(p): p + 1 for p in range(6)})

        output = self._call('simulate', scenario, '--out', trace)
        self.assertIn('3 distinct values: 1, 2, 3, all decided rounds 6-7', output)

        output = self._call('verify', trace, '--k', '3')
        self.assertIn('PASS agreement_structure', output)
        self._fails(EXIT_VIOLATION, 'verify', trace, '--k', '2')

    def test_simulate_complete_graph(self):
        scenario = self._scenario('complete.json', complete_run(4))
        output = self._call('simulate', scenario, '--proposals', '4,3,2,1')
        self.assertIn('1 distinct value: 1, all decided round 4', output)

    def test_simulate_summary_json(self):
        scenario = self._scenario('complete.json', complete_run(2), {0: 4, 1: 9})
        summary = json.loads(self._call('simulate', scenario, '--json'))
        self.assertEqual(summary['distinct_values'], [4])

    def test_simulate_horizon_writes_partial_trace(self):
        scenario = self._scenario('complete.json', complete_run(3))
        trace = self._path('partial.json')
        self._fails(EXIT_VIOLATION, 'simulate', scenario, '--horizon', '2', '--out', trace)
        partial = read_trace(trace)
        self.assertFalse(partial.complete)
        self.assertEqual(partial.last_round, 2)

    def test_simulate_usage_errors(self):
        scenario = self._scenario('complete.json', complete_run(3))
        self._fails(EXIT_USAGE, 'simulate', self._path('missing.json'))
        self._fails(EXIT_USAGE, 'simulate', scenario, '--proposals', '1,2')
        self._fails(EXIT_USAGE, 'simulate', scenario, '--proposals', 'a,b,c')
        with open(self._path('broken.json'), 'w') as handle:
            handle.write('{"n": 3,')
        self._fails(EXIT_USAGE, 'simulate', self._path('broken.json'))

    def test_check_predicate(self):
        scenario = self._path('two_roots.json')
        self._call('generate', 'two-roots', '--out', scenario)
        report = json.loads(self._call('check_predicate', scenario))
        self.assertEqual((report['k'], report['holds'], report['min_k']), (3, True, 2))

        error = self._fails(EXIT_VIOLATION, 'check_predicate', scenario, '--k', '1')
        self.assertIn('violated', str(error))

    def test_check_predicate_defaults_to_min_k(self):
        scenario = self._scenario('lb.json', gen_lower_bound_run(5, 3))
        report = json.loads(self._call('check_predicate', scenario, '--cover'))
        self.assertEqual((report['k'], report['min_k'], report['holds']), (3, 3, True))
        self.assertEqual(len(report['cover']), 5)

    def test_generate_parameter_errors(self):
        self._fails(EXIT_USAGE, 'generate', 'lower-bound', '--n', '3', '--k', '3')
        self._fails(EXIT_USAGE, 'generate', 'random', '--n', '4')
        self._fails(EXIT_USAGE, 'generate', 'arbitrary', '--n', '4', '--density', '1.5')

    def test_generate_random_is_reproducible(self):
        first = self._call('generate', 'random', '--n', '5', '--k', '2', '--seed', '4')
        second = self._call('generate', 'random', '--n', '5', '--k', '2', '--seed', '4')
        self.assertEqual(first, second)
        self.assertEqual(json.loads(first)['k'], 2)

    def test_generate_respects_process_limit(self):
        self._fails(EXIT_USAGE, 'generate', 'complete', '--n', '17')
        with self.settings(KSET_MAX_PROCESSES=4):
            for kind, flags in (
                ('complete', []),
                ('arbitrary', []),
                ('random', ['--k', '2']),
                ('lower-bound', ['--k', '2']),
            ):
                with self.subTest(kind=kind):
                    self._fails(EXIT_USAGE, 'generate', kind, '--n', '5', *flags)

    def test_generated_scenario_at_limit_simulates(self):
        scenario = self._path('complete.json')
        with self.settings(KSET_MAX_PROCESSES=5):
            self._call('generate', 'complete', '--n', '5', '--out', scenario)
        self.assertIn('1 distinct value: 1, all decided round 5', self._call('simulate', scenario))

    def test_simulate_settled_rule(self):
        scenario = self._path('complete.json')
        trace = self._path('trace.json')
        self._call('generate', 'complete', '--n', '4', '--out', scenario)
        output = self._call('simulate', scenario, '--decision-rule', 'settled', '--out', trace)
        self.assertIn('1 distinct value: 1, all decided round 6', output)
        self.assertEqual(read_json(trace)['decision_rule'], 'settled')
        self.assertIn('PASS termination_bound', self._call('verify', trace, '--k', '1'))

    def test_verify_rejects_foreign_vertex(self):
        data = json.loads(dumps(dump_trace(execute(complete_run(3), _default_proposals(3)))))
        graph = data['rounds'][2]['states'][0]['graph']
        graph['vertices'].append(9)
        graph['edges'] += [[0, 9, 3], [9, 0, 3]]
        write_json(self._path('trace.json'), data)
        self._fails(EXIT_USAGE, 'verify', self._path('trace.json'))

    def test_generate_random_gives_up(self):
        with self.settings(KSET_RANDOM_MAX_ATTEMPTS=0):
            self._fails(EXIT_VIOLATION, 'generate', 'random', '--n', '4', '--k', '2')

    def test_verify_rejects_malformed_trace(self):
        write_json(self._path('bad.json'), {'run': {'n': 2, 'tail': []}})
        self._fails(EXIT_USAGE, 'verify', self._path('bad.json'))

    def test_verify_report(self):
        trace = self._path('trace.json')
        report = self._path('report.json')
        write_trace(trace, execute(complete_run(3), _default_proposals(3)))
        self._call('verify', trace, '--report', report)
        verdicts = read_json(report)
        self.assertEqual([v['suite'] for v in verdicts], ['validity', 'termination_bound', 'approximation', 'estimates'])
        self.assertTrue(all(v['passed'] for v in verdicts))

    def test_export_round_and_stable_skeleton(self):
        scenario = self._scenario('lb.json', gen_lower_bound_run(4, 2))
        source = self._call('export_dot', scenario, '--round', '1')
        self.assertIn('digraph skeleton_r1', source)
        self.assertIn('1 -> 2', source)
        self.assertNotIn('1 -> 1', source)
        stable = self._call('export_dot', scenario, '--stable', '--self-loops')
        self.assertIn('digraph stable_skeleton', stable)
        self.assertIn('1 -> 1', stable)
        self._fails(EXIT_USAGE, 'export_dot', scenario, '--round', '0')

    def test_export_approximation_graph(self):
        trace = self._path('trace.json')
        dot = self._path('approx.dot')
        write_trace(trace, execute(complete_run(3), _default_proposals(3)))
        self._call('export_dot', trace, '--approx', 'p0@3', '--out', dot)
        with open(dot) as handle:
            source = handle.read()
        self.assertIn('digraph approx_p0_r3', source)
        self.assertIn('label=3', source)
        self._fails(EXIT_USAGE, 'export_dot', trace, '--approx', 'p5@1')
        self._fails(EXIT_USAGE, 'export_dot', trace, '--approx', 'p0@9')
        self._fails(EXIT_USAGE, 'export_dot', trace, '--approx', 'zero')

    def test_export_approximation_needs_trace(self):
        scenario = self._scenario('complete.json', complete_run(2))
        self._fails(EXIT_USAGE, 'export_dot', scenario, '--approx', 'p0@1')

    def test_check_predicate_on_lower_bound(self):
        scenario = self._path('lb.json')
        self._call('generate', 'lower-bound', '--n', '6', '--k', '3', '--out', scenario)
        self.assertTrue(json.loads(self._call('check_predicate', scenario, '--k', '3'))['holds'])
        self._fails(EXIT_VIOLATION, 'check_predicate', scenario, '--k', '2')

    def test_check_predicate_complete_graph(self):
        scenario = self._scenario('complete.json', complete_run(4))
        self.assertEqual(json.loads(self._call('check_predicate', scenario))['min_k'], 1)

    def test_generated_random_scenario_passes_its_predicate(self):
        scenario = self._path('random.json')
        self._call('generate', 'random', '--n', '8', '--k', '4', '--seed', '1', '--out', scenario)
        report = json.loads(self._call('check_predicate', scenario, '--k', '4'))
        self.assertTrue(report['holds'])

    def test_pipeline_for_every_kind(self):
        cases = {
            'lower-bound': ['--n', '5', '--k', '2'],
            'complete': ['--n', '4'],
            'random': ['--n', '6', '--k', '3', '--seed', '9'],
            'two-roots': [],
            'arbitrary': ['--n', '5', '--seed', '3', '--density', '0.4'],
        }
        for kind, flags in cases.items():
            with self.subTest(kind=kind):
                scenario = self._path(f'{kind}.json')
                trace = self._path(f'{kind}.trace.json')
                self._call('generate', kind, *flags, '--out', scenario)
                k = read_json(scenario).get('k')
                if k is not None:
                    self._call('check_predicate', scenario)
                self._call('simulate', scenario, '--out', trace)
                verify = ['verify', trace] + (['--k', str(k)] if k is not None else [])
                self.assertNotIn('FAIL', self._call(*verify))

    def test_pipeline_is_byte_identical(self):
        outputs = []
        for attempt in ('a', 'b'):
            scenario = self._path(f'{attempt}.json')
            trace = self._path(f'{attempt}.trace.json')
            report = self._path(f'{attempt}.report.json')
            self._call('generate', 'random', '--n', '7', '--k', '3', '--seed', '5', '--out', scenario)
            self._call('simulate', scenario, '--out', trace)
            self._call('verify', trace, '--k', '3', '--report', report)
            with open(trace, 'rb') as t, open(report, 'rb') as r:
                outputs.append((t.read(), r.read()))
        self.assertEqual(outputs[0], outputs[1])

    def test_verify_rejects_corrupted_bytes(self):
        trace = self._path('trace.json')
        write_trace(trace, execute(complete_run(3), _default_proposals(3)))
        with open(trace, 'r+b') as handle:
            handle.seek(10)
            handle.write(b'\x00\xff}{')
        with self.assertRaises(CommandError):
            self._call('verify', trace)

    def test_export_stable_lower_bound(self):
        scenario = self._scenario('lb.json', gen_lower_bound_run(6, 3))
        source = self._call('export_dot', scenario, '--stable')
        for p in range(6):
            self.assertIn(f'label=p{p}', source)
        for p in (3, 4, 5):
            self.assertIn(f'2 -> {p}', source)
        self.assertEqual(source.count('->'), 3)

    def test_export_round_one_approximation(self):
        trace = self._path('trace.json')
        write_trace(trace, execute(complete_run(3), _default_proposals(3)))
        source = self._call('export_dot', trace, '--approx', 'p0@1')
        for q in (1, 2):
            self.assertIn(f'{q} -> 0 [label=1]', source)
