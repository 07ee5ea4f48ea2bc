"""
Unlabeled directed graphs over process ids (or component indices).

Digraph is the common view of round graphs, skeletons and the unweighted
version of a process's approximation graph. SccPartition holds the
strongly connected components in deterministic order.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Tuple

import networkx as nx

from .exceptions import DanglingEdge

Vertex = int
Edge = Tuple[Vertex, Vertex]


@dataclass(frozen=True)
class Digraph:
    vertices: FrozenSet[Vertex]
    edges: FrozenSet[Edge]

    def __post_init__(self):
        for edge in self.edges:
            if edge[0] not in self.vertices or edge[1] not in self.vertices:
                raise DanglingEdge(edge)

    @classmethod
    def from_edges(cls, vertices: Iterable[Vertex], edges: Iterable[Edge]) -> 'Digraph':
        return cls(vertices=frozenset(vertices), edges=frozenset((u, v) for u, v in edges))

    @classmethod
    def over_processes(cls, n: int, edges: Iterable[Edge]) -> 'Digraph':
        """Graph on all of 0..n-1, e.g. a round graph or a skeleton."""
        return cls.from_edges(range(n), edges)

    @cached_property
    def nx_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.vertices))
        g.add_edges_from(sorted(self.edges))
        return g

    def induced_subgraph(self, vertices: Iterable[Vertex]) -> 'Digraph':
        keep = frozenset(vertices) & self.vertices
        return Digraph(
            vertices=keep,
            edges=frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
        )

    def sorted_vertices(self):
        return sorted(self.vertices)

    def sorted_edges(self):
        return sorted(self.edges)


@dataclass(frozen=True)
class SccPartition:
    """Components ordered by smallest member."""
    components: Tuple[FrozenSet[Vertex], ...]

    @cached_property
    def component_of(self) -> Dict[Vertex, int]:
        return {v: i for i, comp in enumerate(self.components) for v in comp}

    def component_containing(self, v: Vertex) -> FrozenSet[Vertex]:
        return self.components[self.component_of[v]]
