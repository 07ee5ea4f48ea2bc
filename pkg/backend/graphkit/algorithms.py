"""
Graph Algorithms

Strongly connected components, root components, condensation, strong
connectivity and backward reachability pruning, computed with networkx.

Results are ordered by smallest vertex id so traces and DOT output stay
byte-stable.
"""
import logging
from typing import FrozenSet, List

import networkx as nx

from .digraph import Digraph, SccPartition, Vertex
from .exceptions import EmptyGraph, VertexNotInGraph

logger = logging.getLogger(__name__)


def scc_partition(g: Digraph) -> SccPartition:
    """Maximal strongly connected components, sorted by smallest member."""
    components = [frozenset(c) for c in nx.strongly_connected_components(g.nx_graph)]
    components.sort(key=min)
    return SccPartition(components=tuple(components))


def condensation(g: Digraph, partition: SccPartition) -> Digraph:
    """
    Contract each component to its index; (i -> j) iff some edge of g leads
    from component i to component j. The result is acyclic.
    """
    contracted = nx.condensation(g.nx_graph, scc=[set(c) for c in partition.components])
    return Digraph.from_edges(contracted.nodes, contracted.edges)


def root_components(g: Digraph) -> List[FrozenSet[Vertex]]:
    """Components without incoming edges from outside themselves."""
    partition = scc_partition(g)
    contracted = condensation(g, partition)
    has_incoming = {j for _, j in contracted.edges}
    return [comp for i, comp in enumerate(partition.components) if i not in has_incoming]


def is_strongly_connected(g: Digraph) -> bool:
    """
    True iff every vertex reaches every vertex. A single vertex counts as
    strongly connected with or without its self-loop.

    Raises:
        EmptyGraph: g has no vertices
    """
    if not g.vertices:
        raise EmptyGraph('is_strongly_connected')
    if len(g.vertices) == 1:
        return True
    return nx.is_strongly_connected(g.nx_graph)


def prune_unreachable_to(g: Digraph, p: Vertex) -> Digraph:
    """
    Keep p and every vertex with a directed path to p.

    Raises:
        VertexNotInGraph: p is not a vertex of g
    """
    if p not in g.vertices:
        raise VertexNotInGraph(p)
    keep = nx.ancestors(g.nx_graph, p) | {p}
    if len(keep) == len(g.vertices):
        return g
    return g.induced_subgraph(keep)
