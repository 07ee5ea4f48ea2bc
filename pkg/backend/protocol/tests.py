from dataclasses import replace

from django.test import SimpleTestCase

from rounds.exceptions import UnknownProcess
from rounds.graphs import RoundGraph
from .algorithm import (
    approximate_skeleton, handle_decide, init_state, send_fn, transition_fn,
    update_estimate_and_decide, update_pt,
)
from .exceptions import MalformedApproxGraph, SelfMessageMissing
from .serializers import ApproxGraphSerializer, MessageSerializer, ProcessStateSerializer
from .state import ApproxGraph, Decision, DecisionRule, DecisionSource, Message, MessageTag, decision_floor


def _prop(sender, x, graph=None):
    return Message(tag=MessageTag.PROP.value, x=x, graph=graph or ApproxGraph.trivial(sender), sender=sender)


def _decide(sender, x, graph=None):
    return Message(tag=MessageTag.DECIDE.value, x=x, graph=graph or ApproxGraph.trivial(sender), sender=sender)


def _run_rounds(graph: RoundGraph, proposals, rounds):
    """Drive all processes through a constant round graph by hand."""
    states = {p: init_state(p, proposals[p], graph.n) for p in range(graph.n)}
    for r in range(1, rounds + 1):
        sent = {p: send_fn(state, r) for p, state in states.items()}
        states = {
            p: transition_fn(state, r, {q: sent[q] for q in graph.in_neighbors(p)})
            for p, state in states.items()
        }
    return states


class ApproxGraphTests(SimpleTestCase):

    def test_edges_sorted_and_indexed(self):
        g = ApproxGraph(owner=0, vertices={0, 1}, edges=((1, 0, 3), (0, 0, 3)))
        self.assertEqual(g.edges, ((0, 0, 3), (1, 0, 3)))
        self.assertEqual(g.label(1, 0), 3)
        self.assertIsNone(g.label(0, 1))

    def test_owner_must_be_vertex(self):
        with self.assertRaises(MalformedApproxGraph):
            ApproxGraph(owner=2, vertices={0, 1}, edges=())

    def test_one_label_per_pair(self):
        with self.assertRaises(MalformedApproxGraph):
            ApproxGraph(owner=0, vertices={0, 1}, edges=((1, 0, 3), (1, 0, 2)))

    def test_endpoints_must_be_vertices(self):
        with self.assertRaises(MalformedApproxGraph):
            ApproxGraph(owner=0, vertices={0}, edges=((1, 0, 3),))


class InitAndSendTests(SimpleTestCase):

    def test_initial_state(self):
        state = init_state(0, 7, 3)
        self.assertEqual(state.pt, {0, 1, 2})
        self.assertEqual(state.x, 7)
        self.assertEqual(state.graph.vertices, {0})
        self.assertEqual(state.graph.edges, ())
        self.assertFalse(state.decided)
        self.assertIsNone(state.decision)

    def test_single_process_system(self):
        self.assertEqual(init_state(0, 0, 1).pt, {0})

    def test_unknown_process(self):
        with self.assertRaises(UnknownProcess):
            init_state(3, 0, 3)

    def test_tag_follows_decided(self):
        state = init_state(1, 4, 3)
        self.assertEqual(send_fn(state, 1).tag, MessageTag.PROP)
        decided = replace(state, decided=True, decision=Decision(4, 3, DecisionSource.SELF.value))
        message = send_fn(decided, 4)
        self.assertEqual(message.tag, MessageTag.DECIDE)
        self.assertEqual((message.x, message.sender), (4, 1))

    def test_message_keeps_sent_graph(self):
        state = init_state(0, 1, 2)
        message = send_fn(state, 1)
        later = transition_fn(state, 1, {0: message, 1: _prop(1, 5)})
        self.assertEqual(message.graph, ApproxGraph.trivial(0))
        self.assertNotEqual(later.graph, message.graph)


class UpdatePtTests(SimpleTestCase):

    def test_intersection_with_senders(self):
        state = init_state(0, 1, 3)
        updated = update_pt(state, {0: _prop(0, 1), 2: _prop(2, 1)})
        self.assertEqual(updated.pt, {0, 2})

    def test_never_grows_back(self):
        state = update_pt(init_state(0, 1, 3), {0: _prop(0, 1)})
        state = update_pt(state, {q: _prop(q, 1) for q in range(3)})
        self.assertEqual(state.pt, {0})


class HandleDecideTests(SimpleTestCase):

    def _state(self, pt):
        return replace(init_state(0, 9, 3), pt=frozenset(pt))

    def test_adopts_decision_from_timely_neighbour(self):
        state = handle_decide(self._state({0, 1}), {0: _prop(0, 9), 1: _decide(1, 5)}, 4)
        self.assertTrue(state.decided)
        self.assertEqual(state.x, 5)
        self.assertEqual(state.decision, Decision(5, 4, DecisionSource.RELAY.value))

    def test_ignores_untimely_sender(self):
        state = self._state({0})
        self.assertEqual(handle_decide(state, {0: _prop(0, 9), 1: _decide(1, 5)}, 4), state)

    def test_smallest_relayed_value_wins(self):
        inbox = {0: _prop(0, 9), 1: _decide(1, 5), 2: _decide(2, 3)}
        state = handle_decide(self._state({0, 1, 2}), inbox, 5)
        self.assertEqual(state.decision.value, 3)

    def test_decided_process_unchanged(self):
        state = replace(self._state({0, 1}), decided=True, decision=Decision(9, 3, DecisionSource.SELF.value))
        self.assertEqual(handle_decide(state, {0: _decide(0, 9), 1: _decide(1, 1)}, 4), state)


class ApproximateSkeletonTests(SimpleTestCase):

    def test_first_round_fresh_edges(self):
        state = replace(init_state(0, 1, 3), pt=frozenset({0, 1}))
        state = approximate_skeleton(state, 1, {0: _prop(0, 1), 1: _prop(1, 2)})
        self.assertEqual(state.graph.vertices, {0, 1})
        self.assertEqual(state.graph.edges, ((0, 0, 1), (1, 0, 1)))

    def _received(self, old_label):
        return ApproxGraph(owner=1, vertices={1, 2}, edges=((1, 1, 3), (2, 1, old_label)))

    def test_edge_at_window_boundary_dropped(self):
        state = replace(init_state(0, 1, 3), pt=frozenset({0, 1}))
        state = approximate_skeleton(state, 4, {0: _prop(0, 1), 1: _prop(1, 1, self._received(1))})
        self.assertIsNone(state.graph.label(2, 1))
        self.assertNotIn(2, state.graph.vertices)
        self.assertEqual(state.graph.label(1, 1), 3)

    def test_edge_inside_window_kept(self):
        state = replace(init_state(0, 1, 3), pt=frozenset({0, 1}))
        state = approximate_skeleton(state, 4, {0: _prop(0, 1), 1: _prop(1, 1, self._received(2))})
        self.assertEqual(state.graph.label(2, 1), 2)
        self.assertEqual(state.graph.vertices, {0, 1, 2})

    def test_fresh_label_dominates(self):
        stale = ApproxGraph(owner=1, vertices={0, 1}, edges=((1, 0, 4), (0, 1, 4)))
        state = replace(init_state(0, 1, 3), pt=frozenset({0, 1}))
        state = approximate_skeleton(state, 5, {0: _prop(0, 1), 1: _prop(1, 1, stale)})
        self.assertEqual(state.graph.label(1, 0), 5)
        self.assertEqual(state.graph.label(0, 1), 4)

    def test_largest_received_label_kept(self):
        a = ApproxGraph(owner=1, vertices={1, 2}, edges=((2, 1, 3),))
        b = ApproxGraph(owner=2, vertices={1, 2}, edges=((2, 1, 4), (1, 2, 4)))
        state = replace(init_state(0, 1, 4), pt=frozenset({0, 1, 2}))
        inbox = {0: _prop(0, 1), 1: _prop(1, 1, a), 2: _prop(2, 1, b)}
        state = approximate_skeleton(state, 5, inbox)
        self.assertEqual(state.graph.label(2, 1), 4)

    def test_vertices_not_reaching_owner_pruned(self):
        received = ApproxGraph(owner=1, vertices={0, 1, 2}, edges=((0, 1, 2), (0, 2, 2)))
        state = replace(init_state(0, 1, 3), pt=frozenset({0, 1}))
        state = approximate_skeleton(state, 3, {0: _prop(0, 1), 1: _prop(1, 1, received)})
        self.assertEqual(state.graph.vertices, {0, 1})
        self.assertIsNone(state.graph.label(0, 2))
        self.assertEqual(state.graph.label(0, 1), 2)


class EstimateAndDecideTests(SimpleTestCase):

    def test_minimum_before_round_n(self):
        state = replace(init_state(0, 4, 3), pt=frozenset({0, 1}))
        state = update_estimate_and_decide(state, 2, {0: _prop(0, 4), 1: _prop(1, 2)})
        self.assertEqual(state.x, 2)
        self.assertFalse(state.decided)

    def test_isolated_process_decides_at_round_n(self):
        state = replace(
            init_state(0, 6, 3),
            pt=frozenset({0}),
            graph=ApproxGraph(owner=0, vertices={0}, edges=((0, 0, 3),)),
        )
        state = update_estimate_and_decide(state, 3, {0: _prop(0, 6)})
        self.assertTrue(state.decided)
        self.assertEqual(state.decision, Decision(6, 3, DecisionSource.SELF.value))

    def test_settled_rule_waits_until_round_2n_minus_2(self):
        state = replace(
            init_state(0, 6, 3),
            pt=frozenset({0}),
            graph=ApproxGraph(owner=0, vertices={0}, edges=((0, 0, 3),)),
        )
        early = update_estimate_and_decide(state, 3, {0: _prop(0, 6)}, DecisionRule.SETTLED)
        self.assertFalse(early.decided)
        later = update_estimate_and_decide(early, 4, {0: _prop(0, 6)}, DecisionRule.SETTLED)
        self.assertEqual(later.decision, Decision(6, 4, DecisionSource.SELF.value))

    def test_untimely_estimates_ignored(self):
        state = replace(init_state(0, 4, 3), pt=frozenset({0}))
        state = update_estimate_and_decide(state, 1, {0: _prop(0, 4), 1: _prop(1, 0)})
        self.assertEqual(state.x, 4)

    def test_decided_process_unchanged(self):
        state = replace(
            init_state(0, 4, 2),
            pt=frozenset({0, 1}),
            decided=True,
            decision=Decision(4, 2, DecisionSource.RELAY.value),
        )
        self.assertEqual(update_estimate_and_decide(state, 3, {0: _prop(0, 4), 1: _prop(1, 0)}), state)


class TransitionTests(SimpleTestCase):

    def test_missing_self_message(self):
        with self.assertRaises(SelfMessageMissing):
            transition_fn(init_state(0, 1, 2), 1, {1: _prop(1, 1)})

    def test_complete_graph_decides_minimum_at_round_n(self):
        states = _run_rounds(RoundGraph.complete(3), {0: 3, 1: 1, 2: 2}, 3)
        for state in states.values():
            self.assertEqual(state.decision, Decision(1, 3, DecisionSource.SELF.value))

    def test_complete_graph_undecided_before_round_n(self):
        states = _run_rounds(RoundGraph.complete(3), {0: 3, 1: 1, 2: 2}, 2)
        self.assertTrue(all(state.x == 1 and not state.decided for state in states.values()))

    def test_single_process_decides_in_round_one(self):
        state = _run_rounds(RoundGraph.self_loops(1), {0: 8}, 1)[0]
        self.assertEqual(state.decision, Decision(8, 1, DecisionSource.SELF.value))

    def test_labels_stay_inside_window(self):
        # 0 -> 1 -> 2 chain: 2 keeps learning about 0 -> 1 through 1
        graph = RoundGraph.from_edges(3, [(0, 1), (1, 2)])
        for rounds in range(1, 7):
            states = _run_rounds(graph, {0: 0, 1: 1, 2: 2}, rounds)
            for state in states.values():
                self.assertIn(state.id, state.graph.vertices)
                for _, _, label in state.graph.edges:
                    self.assertGreater(label, rounds - 3)
                    self.assertLessEqual(label, rounds)


class SerializerTests(SimpleTestCase):

    def test_state_representation_is_sorted(self):
        state = _run_rounds(RoundGraph.complete(3), {0: 3, 1: 1, 2: 2}, 3)[2]
        data = ProcessStateSerializer(state).data
        self.assertEqual(data['pt'], [0, 1, 2])
        self.assertEqual(data['graph']['vertices'], [0, 1, 2])
        self.assertEqual(data['graph']['edges'], sorted(data['graph']['edges']))
        self.assertEqual(data['decision'], {'value': 1, 'round': 3, 'source': 'self'})

    def test_state_rebuilds(self):
        state = _run_rounds(RoundGraph.from_edges(3, [(0, 1), (1, 2)]), {0: 0, 1: 1, 2: 2}, 4)[2]
        serializer = ProcessStateSerializer(data=ProcessStateSerializer(state).data)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(ProcessStateSerializer.build(serializer.validated_data), state)

    def test_message_rejects_bad_tag(self):
        data = MessageSerializer(_prop(0, 1)).data
        data['tag'] = 'maybe'
        self.assertFalse(MessageSerializer(data=data).is_valid())

    def test_graph_rejects_dangling_edge(self):
        serializer = ApproxGraphSerializer(data={'owner': 0, 'vertices': [0], 'edges': [[1, 0, 2]]})
        self.assertFalse(serializer.is_valid())

    def test_decided_flag_must_match_decision(self):
        data = ProcessStateSerializer(init_state(0, 1, 2)).data
        data['decided'] = True
        self.assertFalse(ProcessStateSerializer(data=data).is_valid())


class DecisionFloorTests(SimpleTestCase):

    def test_floors(self):
        self.assertEqual(decision_floor(DecisionRule.ROUND_N, 5), 5)
        self.assertEqual(decision_floor('settled', 5), 8)
        self.assertEqual(decision_floor('settled', 2), 2)
        self.assertEqual(decision_floor('settled', 1), 1)

    def test_unknown_rule(self):
        with self.assertRaises(ValueError):
            decision_floor('eventually', 3)
