import itertools
import random

from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from .algorithms import (
    condensation, is_strongly_connected, prune_unreachable_to, root_components, scc_partition,
)
from .digraph import Digraph
from .dot import digraph_to_dot, render_dot
from .exceptions import DanglingEdge, EmptyGraph, VertexNotInGraph
from .oracle import (
    oracle_components, oracle_is_strongly_connected, oracle_root_components, reachability_oracle,
)


def _graph(vertices, edges):
    return Digraph.from_edges(vertices, edges)


def _has_cycle(g):
    """Kahn's algorithm; True iff some vertex is never freed."""
    indegree = {v: 0 for v in g.vertices}
    for _, v in g.edges:
        indegree[v] += 1
    ready = [v for v, d in indegree.items() if d == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for a, b in g.edges:
            if a == u:
                indegree[b] -= 1
                if indegree[b] == 0:
                    ready.append(b)
    return seen != len(g.vertices)


@st.composite
def digraphs(draw, min_vertices=1, max_vertices=8):
    size = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    pairs = [(u, v) for u in range(size) for v in range(size)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return _graph(range(size), chosen)


class DigraphTests(SimpleTestCase):

    def test_edges_must_join_vertices(self):
        with self.assertRaises(DanglingEdge):
            _graph({0, 1}, [(0, 2)])

    def test_induced_subgraph_drops_outside_edges(self):
        g = _graph(range(3), [(0, 1), (1, 2), (2, 0)])
        sub = g.induced_subgraph({0, 1})
        self.assertEqual(sub.edges, {(0, 1)})


class SccPartitionTests(SimpleTestCase):

    def test_two_cycle_is_one_component(self):
        partition = scc_partition(_graph({0, 1}, [(0, 1), (1, 0)]))
        self.assertEqual(partition.components, (frozenset({0, 1}),))

    def test_chain_gives_singletons_in_id_order(self):
        g = _graph(range(3), [(0, 1), (1, 2), (0, 0), (1, 1), (2, 2)])
        partition = scc_partition(g)
        self.assertEqual(partition.components, (frozenset({0}), frozenset({1}), frozenset({2})))
        self.assertEqual(partition.component_of, {0: 0, 1: 1, 2: 2})

    def test_components_sorted_by_smallest_member(self):
        g = _graph(range(5), [(4, 1), (1, 4), (0, 3), (3, 0)])
        partition = scc_partition(g)
        self.assertEqual([min(c) for c in partition.components], [0, 1, 2])
        self.assertEqual(partition.component_containing(4), frozenset({1, 4}))


class RootComponentTests(SimpleTestCase):

    def test_two_roots_feeding_one_sink(self):
        # p1<->p2 and p3->p4->p5->p3, both cycles feeding p6 (0-based ids)
        edges = [(0, 1), (1, 0), (2, 3), (3, 4), (4, 2), (1, 5), (4, 5)]
        g = _graph(range(6), edges)
        self.assertEqual(root_components(g), [frozenset({0, 1}), frozenset({2, 3, 4})])
        self.assertEqual(root_components(g), oracle_root_components(g))

    def test_complete_graph_has_single_root(self):
        g = _graph(range(4), itertools.product(range(4), repeat=2))
        self.assertEqual(root_components(g), [frozenset(range(4))])

    def test_every_nonempty_graph_has_a_root(self):
        rng = random.Random(7)
        for _ in range(200):
            size = rng.randint(1, 8)
            edges = [(u, v) for u in range(size) for v in range(size) if rng.random() < 0.25]
            self.assertTrue(root_components(_graph(range(size), edges)))


class CondensationTests(SimpleTestCase):

    def test_two_cycle_condenses_to_single_node(self):
        g = _graph({0, 1}, [(0, 1), (1, 0)])
        contracted = condensation(g, scc_partition(g))
        self.assertEqual(contracted.vertices, {0})
        self.assertEqual(contracted.edges, frozenset())

    def test_chain_condenses_to_path(self):
        g = _graph(range(3), [(0, 1), (1, 2)])
        contracted = condensation(g, scc_partition(g))
        self.assertEqual(contracted.edges, {(0, 1), (1, 2)})

    @hypothesis_settings(max_examples=300, deadline=None)
    @given(digraphs())
    def test_condensation_is_acyclic(self, g):
        self.assertFalse(_has_cycle(condensation(g, scc_partition(g))))


class StrongConnectivityTests(SimpleTestCase):

    def test_single_vertex_without_loop(self):
        self.assertTrue(is_strongly_connected(_graph({3}, [])))

    def test_chain_is_not_strongly_connected(self):
        self.assertFalse(is_strongly_connected(_graph({0, 1}, [(0, 1)])))

    def test_three_cycle(self):
        self.assertTrue(is_strongly_connected(_graph(range(3), [(0, 1), (1, 2), (2, 0)])))

    def test_empty_graph_is_rejected(self):
        with self.assertRaises(EmptyGraph):
            is_strongly_connected(_graph((), ()))


class PruneTests(SimpleTestCase):

    def test_drops_vertices_without_path(self):
        p, a, b, c = 0, 1, 2, 3
        g = _graph({a, b, p, c}, [(a, p), (b, a)])
        self.assertEqual(prune_unreachable_to(g, p).vertices, {a, b, p})

    def test_strongly_connected_graph_unchanged(self):
        g = _graph(range(3), [(0, 1), (1, 2), (2, 0)])
        self.assertEqual(prune_unreachable_to(g, 1), g)

    def test_star_pointing_outwards_keeps_only_center(self):
        g = _graph(range(4), [(0, 1), (0, 2), (0, 3)])
        pruned = prune_unreachable_to(g, 0)
        self.assertEqual(pruned.vertices, {0})
        self.assertEqual(pruned.edges, frozenset())

    def test_unknown_vertex(self):
        with self.assertRaises(VertexNotInGraph):
            prune_unreachable_to(_graph({0}, []), 5)


class ReachabilityOracleTests(SimpleTestCase):

    def test_chain_closure(self):
        closure = reachability_oracle(_graph(range(3), [(0, 1), (1, 2)]))
        self.assertEqual(
            closure.pairs(),
            {(0, 1), (0, 2), (1, 2), (0, 0), (1, 1), (2, 2)},
        )

    def test_two_cycle_closure(self):
        closure = reachability_oracle(_graph({0, 1}, [(0, 1), (1, 0)]))
        self.assertEqual(closure.pairs(), {(0, 0), (0, 1), (1, 0), (1, 1)})

    def _assert_agrees(self, g):
        self.assertEqual(list(scc_partition(g).components), oracle_components(g))
        self.assertEqual(root_components(g), oracle_root_components(g))
        if g.vertices:
            self.assertEqual(is_strongly_connected(g), oracle_is_strongly_connected(g))

    def test_exhaustive_up_to_four_vertices(self):
        # Self-loops never change reachability between distinct vertices, so
        # they are enumerated only where it stays cheap (up to three vertices).
        for size in range(0, 5):
            pairs = [(u, v) for u in range(size) for v in range(size) if size <= 3 or u != v]
            for mask in range(1 << len(pairs)):
                edges = [pair for bit, pair in enumerate(pairs) if mask >> bit & 1]
                self._assert_agrees(_graph(range(size), edges))

    def test_random_graphs_five_to_eight_vertices(self):
        rng = random.Random(2024)
        for _ in range(10_000):
            size = rng.randint(5, 8)
            density = rng.choice((0.1, 0.2, 0.35, 0.5))
            edges = [(u, v) for u in range(size) for v in range(size) if rng.random() < density]
            self._assert_agrees(_graph(range(size), edges))

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(digraphs(min_vertices=2), st.randoms(use_true_random=False))
    def test_subgraph_components_nest(self, g, rng):
        sub = _graph(g.vertices, [e for e in g.sorted_edges() if rng.random() < 0.5])
        outer = scc_partition(g)
        for comp in scc_partition(sub).components:
            self.assertTrue(any(comp <= big for big in outer.components))

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(digraphs(min_vertices=2))
    def test_merging_two_components_breaks_strong_connectivity(self, g):
        components = scc_partition(g).components
        for a, b in itertools.combinations(components, 2):
            self.assertFalse(is_strongly_connected(g.induced_subgraph(a | b)))


class DotExportTests(SimpleTestCase):

    def test_self_loops_omitted_by_default(self):
        g = _graph(range(2), [(0, 0), (0, 1), (1, 1)])
        text = digraph_to_dot(g)
        self.assertIn('0 -> 1', text)
        self.assertNotIn('0 -> 0', text)
        self.assertIn('0 -> 0', digraph_to_dot(g, include_self_loops=True))

    def test_labels_and_stable_output(self):
        labels = {(1, 0): 4, (0, 0): 4}
        first = render_dot({0, 1}, labels, labels=labels, name='approx')
        second = render_dot({1, 0}, list(reversed(list(labels))), labels=labels, name='approx')
        self.assertEqual(first, second)
        self.assertIn('label=4', first)
        self.assertIn('label=p1', first)
