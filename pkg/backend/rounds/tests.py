import os
import tempfile

from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from common.utils.jsonio import JsonInputError, dumps, read_json, write_json
from predicates.generators import gen_arbitrary, gen_two_roots
from .exceptions import (
    EndpointOutOfRange, InconsistentSystemSize, MissingSelfLoop, RoundOutOfRange, ScenarioFormatError,
    UnknownProcess,
)
from .graphs import RoundGraph, RunSpec
from .serializers import RunSpecSerializer, ScenarioSerializer, parse_scenario, read_scenario
from .services import (
    SkeletonTracker, complete_run, pt_from_heard_of, pt_from_suspicions, round_graph, run_from_heard_of,
    silence_after, skeleton_at, stable_skeleton, timely_neighborhood,
)


def _loops(n):
    return {(p, p) for p in range(n)}


class RoundGraphTests(SimpleTestCase):

    def test_self_loops_inserted(self):
        g = RoundGraph.from_edges(3, [(0, 1)])
        self.assertEqual(g.edges, frozenset({(0, 1)} | _loops(3)))
        self.assertEqual(g.in_neighbors(1), frozenset({0, 1}))

    def test_missing_self_loop(self):
        with self.assertRaises(MissingSelfLoop) as ctx:
            RoundGraph.from_edges(2, [(0, 0)], add_self_loops=False)
        self.assertEqual(ctx.exception.process, 1)

    def test_endpoint_out_of_range(self):
        with self.assertRaises(EndpointOutOfRange):
            RoundGraph.from_edges(2, [(0, 2)])

    def test_run_graphs_share_n(self):
        with self.assertRaises(InconsistentSystemSize):
            RunSpec(n=3, prefix=(), tail=RoundGraph.complete(2))


class SkeletonTests(SimpleTestCase):

    def test_round_graph_prefix_then_tail(self):
        run = gen_two_roots()
        self.assertIn((2, 1), round_graph(run, 1).edges)
        self.assertNotIn((0, 2), round_graph(run, 3).edges)
        self.assertEqual(round_graph(run, 4), run.tail)
        self.assertEqual(round_graph(run, 400), run.tail)
        with self.assertRaises(RoundOutOfRange):
            round_graph(run, 0)

    def test_skeleton_shrinks_until_stable(self):
        run = gen_two_roots()
        self.assertEqual(skeleton_at(run, 1).edges, round_graph(run, 1).edges)
        self.assertEqual(skeleton_at(run, 2).edges, round_graph(run, 2).edges)
        stable, r_st = stable_skeleton(run)
        self.assertEqual(r_st, 4)
        self.assertTrue(stable.is_stable)
        self.assertEqual(skeleton_at(run, 4).edges, stable.edges)
        self.assertEqual(skeleton_at(run, 50).edges, stable.edges)

    def test_constant_run_stable_from_round_one(self):
        _, r_st = stable_skeleton(complete_run(4))
        self.assertEqual(r_st, 1)

    def test_timely_neighborhood(self):
        run = gen_two_roots()
        self.assertEqual(timely_neighborhood(run, 0, 1), frozenset({0, 1, 5}))
        self.assertEqual(timely_neighborhood(run, 0), frozenset({0, 1}))
        self.assertEqual(timely_neighborhood(run, 5), frozenset({1, 4, 5}))
        with self.assertRaises(UnknownProcess):
            timely_neighborhood(run, 6)

    @hypothesis_settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=200), st.integers(1, 12))
    def test_skeletons_are_nested(self, n, seed, r):
        run = gen_arbitrary(n, seed)
        self.assertTrue(skeleton_at(run, r + 1).edges <= skeleton_at(run, r).edges)
        self.assertTrue(_loops(n) <= skeleton_at(run, r).edges)


class SkeletonTrackerTests(SimpleTestCase):

    def test_timely_until(self):
        tracker = SkeletonTracker(gen_two_roots())
        self.assertEqual(tracker.timely_until(2, 1), 1)
        self.assertEqual(tracker.timely_until(0, 2), 2)
        self.assertEqual(tracker.timely_until(5, 0), 3)
        self.assertIsNone(tracker.timely_until(1, 0))
        self.assertEqual(tracker.timely_until(0, 3), 0)

    def test_is_timely(self):
        tracker = SkeletonTracker(gen_two_roots())
        self.assertTrue(tracker.is_timely(5, 0, 3))
        self.assertFalse(tracker.is_timely(5, 0, 4))
        self.assertTrue(tracker.is_timely(1, 0, 1000))
        self.assertFalse(tracker.is_timely(1, 0, 0))

    def test_window_round(self):
        tracker = SkeletonTracker(gen_two_roots())
        self.assertEqual(tracker.stabilization_round, 4)
        self.assertEqual(tracker.window_round(6), 4)
        self.assertEqual(tracker.window_round(1), 1)

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=200))
    def test_agrees_with_direct_computation(self, n, seed):
        run = gen_arbitrary(n, seed, prefix_len=4)
        tracker = SkeletonTracker(run)
        for r in range(1, 8):
            self.assertEqual(tracker.skeleton(r).edges, skeleton_at(run, r).edges)
            for p in range(n):
                self.assertEqual(tracker.pt(p, r), timely_neighborhood(run, p, r))
                for q in range(n):
                    self.assertEqual(tracker.is_timely(q, p, r), q in timely_neighborhood(run, p, r))


class OtherModelTests(SimpleTestCase):

    def test_pt_from_heard_of(self):
        pt = pt_from_heard_of(3, [{0: [0, 1], 1: [1]}, {0: [0]}])
        self.assertEqual(pt, {0: frozenset({0}), 1: frozenset(), 2: frozenset()})

    def test_pt_from_suspicions(self):
        pt = pt_from_suspicions(3, [{0: [1]}, {0: [2], 1: [0]}])
        self.assertEqual(pt, {0: frozenset({0}), 1: frozenset({1, 2}), 2: frozenset({0, 1, 2})})

    def test_run_from_heard_of(self):
        run = run_from_heard_of(2, [{0: [1]}], {1: [0]})
        self.assertEqual(run.prefix[0].edges, frozenset({(1, 0)} | _loops(2)))
        self.assertEqual(run.tail.edges, frozenset({(0, 1)} | _loops(2)))
        self.assertEqual(stable_skeleton(run)[0].edges, frozenset(_loops(2)))

    def test_silence_after_crash(self):
        run = silence_after(complete_run(3), {0: 2})
        self.assertEqual(run.prefix_length, 1)
        self.assertEqual(round_graph(run, 1), RoundGraph.complete(3))
        self.assertNotIn((0, 1), round_graph(run, 2).edges)
        self.assertIn((0, 0), round_graph(run, 2).edges)
        stable, r_st = stable_skeleton(run)
        self.assertEqual(r_st, 2)
        self.assertEqual(stable.in_neighbors(1), frozenset({1, 2}))

    def test_silence_after_nothing(self):
        run = complete_run(3)
        self.assertIs(silence_after(run, {}), run)
        with self.assertRaises(RoundOutOfRange):
            silence_after(run, {0: 0})


class ScenarioSerializerTests(SimpleTestCase):

    def test_minimal_scenario(self):
        run, proposals, k = parse_scenario({'n': 3, 'tail': [[0, 1]]})
        self.assertEqual(run, RunSpec.constant(RoundGraph.from_edges(3, [(0, 1)])))
        self.assertIsNone(proposals)
        self.assertIsNone(k)

    def test_proposals_and_k(self):
        _, proposals, k = parse_scenario({'n': 2, 'tail': [], 'proposals': {'0': 5, '1': 3}, 'k': 1})
        self.assertEqual(proposals, {0: 5, 1: 3})
        self.assertEqual(k, 1)

    def test_rejected_inputs(self):
        for data in (
            {'n': 3, 'tail': [[0, 1], [0, 1]]},
            {'n': 3, 'tail': [[0, 3]]},
            {'n': 3, 'prefix': [[[0, 1, 2]]], 'tail': []},
            {'n': 3, 'tail': [], 'proposals': {'0': 1, '1': 2}},
            {'n': 2, 'tail': [], 'proposals': {'0': 1, 'x': 2}},
            {'n': 2, 'tail': [], 'k': 0},
            {'n': 0, 'tail': []},
            {'tail': []},
        ):
            with self.subTest(data=data):
                with self.assertRaises(ScenarioFormatError):
                    parse_scenario(data)

    def test_size_limit(self):
        with self.assertRaises(ScenarioFormatError):
            parse_scenario({'n': 10_000, 'tail': []})

    def test_represent_then_parse(self):
        run = gen_two_roots()
        data = ScenarioSerializer.represent_scenario(run, {p: 1 for p in range(6)}, 3)
        self.assertEqual(data['tail'][0], [0, 0])
        self.assertEqual(parse_scenario(data), (run, {p: 1 for p in range(6)}, 3))
        self.assertNotIn('k', RunSpecSerializer.represent(run))


class JsonFileTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_canonical_text(self):
        text = dumps({'b': 1, 'a': [1, 2]})
        self.assertTrue(text.endswith('\n'))
        self.assertLess(text.index('"a"'), text.index('"b"'))

    def test_read_scenario_file(self):
        path = os.path.join(self.tmp.name, 'scenario.json')
        write_json(path, {'n': 2, 'tail': [[1, 0]]})
        run, _, _ = read_scenario(path)
        self.assertEqual(run.tail.in_neighbors(0), frozenset({0, 1}))
        self.assertEqual(read_json(path)['n'], 2)

    def test_unreadable_inputs(self):
        with self.assertRaises(JsonInputError):
            read_json(os.path.join(self.tmp.name, 'missing.json'))
        path = os.path.join(self.tmp.name, 'broken.json')
        with open(path, 'w') as handle:
            handle.write('[1, 2')
        with self.assertRaises(JsonInputError) as ctx:
            read_json(path)
        self.assertIn('malformed JSON', str(ctx.exception))
