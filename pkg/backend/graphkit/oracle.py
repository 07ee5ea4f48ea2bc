"""
Reachability oracle.

An independent transitive-closure implementation (Warshall's triple loop,
no networkx) and the SCC / root / connectivity answers recomputed from it.
Tests and the trace verifiers' self-checks compare graph-kit results
against these.
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

from .digraph import Digraph, Vertex


@dataclass(frozen=True)
class ReachabilityMatrix:
    """matrix[i][j] is True iff order[i] reaches order[j] (reflexive)."""
    order: Tuple[Vertex, ...]
    matrix: Tuple[Tuple[bool, ...], ...]

    def index(self, v: Vertex) -> int:
        return self.order.index(v)

    def reaches(self, u: Vertex, v: Vertex) -> bool:
        return self.matrix[self.index(u)][self.index(v)]

    def pairs(self) -> FrozenSet[Tuple[Vertex, Vertex]]:
        return frozenset(
            (u, v)
            for i, u in enumerate(self.order)
            for j, v in enumerate(self.order)
            if self.matrix[i][j]
        )


def reachability_oracle(g: Digraph) -> ReachabilityMatrix:
    order = tuple(sorted(g.vertices))
    position = {v: i for i, v in enumerate(order)}
    size = len(order)
    reach = [[i == j for j in range(size)] for i in range(size)]
    for u, v in g.edges:
        reach[position[u]][position[v]] = True
    for k in range(size):
        for i in range(size):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(size):
                    if row_k[j]:
                        row_i[j] = True
    return ReachabilityMatrix(order=order, matrix=tuple(tuple(row) for row in reach))


def oracle_components(g: Digraph) -> List[FrozenSet[Vertex]]:
    """Mutual-reachability classes, sorted by smallest member."""
    closure = reachability_oracle(g)
    classes: Dict[Vertex, FrozenSet[Vertex]] = {}
    for u in closure.order:
        if u in classes:
            continue
        members = frozenset(v for v in closure.order if closure.reaches(u, v) and closure.reaches(v, u))
        for v in members:
            classes[v] = members
    return sorted(set(classes.values()), key=min)


def oracle_root_components(g: Digraph) -> List[FrozenSet[Vertex]]:
    """Classes C such that every edge (q -> p) with p in C has q in C."""
    roots = []
    for comp in oracle_components(g):
        if all(q in comp for q, p in g.edges if p in comp):
            roots.append(comp)
    return roots


def oracle_is_strongly_connected(g: Digraph) -> bool:
    closure = reachability_oracle(g)
    return all(all(row) for row in closure.matrix)
