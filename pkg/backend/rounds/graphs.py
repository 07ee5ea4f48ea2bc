"""
Round Model Types

Immutable value types of the round-based communication model:

- RoundGraph: who hears whom in one round (self-loops mandatory)
- RunSpec: an infinite run encoded as a finite prefix of round graphs
  followed by one tail graph repeated forever
- SkeletonGraph: the edges that were present in every round up to some round
  (or in every round of the run, for the stable skeleton)

Processes are plain integers in [0, n).
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .exceptions import EndpointOutOfRange, InconsistentSystemSize, MissingSelfLoop

ProcessId = int
Edge = Tuple[ProcessId, ProcessId]


def _senders_by_receiver(n: int, edges: FrozenSet[Edge]) -> Dict[ProcessId, FrozenSet[ProcessId]]:
    senders = {p: set() for p in range(n)}
    for q, p in edges:
        senders.setdefault(p, set()).add(q)
    return {p: frozenset(qs) for p, qs in senders.items()}


def validate_round_graph(g: 'RoundGraph') -> 'RoundGraph':
    """
    Check the round graph invariants and return the graph unchanged.

    Raises:
        EndpointOutOfRange: an edge leaves [0, n)
        MissingSelfLoop: some process does not hear itself
    """
    for edge in sorted(g.edges):
        if not all(0 <= end < g.n for end in edge):
            raise EndpointOutOfRange(edge, g.n)
    for p in range(g.n):
        if (p, p) not in g.edges:
            raise MissingSelfLoop(p)
    return g


@dataclass(frozen=True)
class RoundGraph:
    """One round's communication graph; (q, p) in edges iff p receives q's message."""
    n: int
    edges: FrozenSet[Edge]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], add_self_loops: bool = True) -> 'RoundGraph':
        """Build and validate a round graph, inserting self-loops unless told not to."""
        edge_set = {(int(q), int(p)) for q, p in edges}
        if add_self_loops:
            edge_set.update((p, p) for p in range(n))
        return validate_round_graph(cls(n=n, edges=frozenset(edge_set)))

    @classmethod
    def complete(cls, n: int) -> 'RoundGraph':
        return cls.from_edges(n, ((q, p) for q in range(n) for p in range(n)))

    @classmethod
    def self_loops(cls, n: int) -> 'RoundGraph':
        return cls.from_edges(n, ())

    @cached_property
    def _senders(self) -> Dict[ProcessId, FrozenSet[ProcessId]]:
        return _senders_by_receiver(self.n, self.edges)

    def in_neighbors(self, p: ProcessId) -> FrozenSet[ProcessId]:
        return self._senders.get(p, frozenset())

    def sorted_edges(self):
        return sorted(self.edges)


@dataclass(frozen=True)
class RunSpec:
    """
    Eventually-constant run: prefix[0] is round 1, ..., prefix[L-1] is round L,
    and tail is the graph of every round r > L.
    """
    n: int
    prefix: Tuple[RoundGraph, ...]
    tail: RoundGraph

    def __post_init__(self):
        object.__setattr__(self, 'prefix', tuple(self.prefix))
        for g in (*self.prefix, self.tail):
            if g.n != self.n:
                raise InconsistentSystemSize(self.n, g.n)
            validate_round_graph(g)

    @classmethod
    def constant(cls, graph: RoundGraph) -> 'RunSpec':
        return cls(n=graph.n, prefix=(), tail=graph)

    @property
    def prefix_length(self) -> int:
        return len(self.prefix)


@dataclass(frozen=True)
class SkeletonGraph:
    """
    Intersection of the round graphs of rounds 1..as_of_round.
    as_of_round is None for the stable skeleton of the whole run.
    """
    n: int
    edges: FrozenSet[Edge]
    as_of_round: Optional[int]

    @property
    def is_stable(self) -> bool:
        return self.as_of_round is None

    @cached_property
    def _senders(self) -> Dict[ProcessId, FrozenSet[ProcessId]]:
        return _senders_by_receiver(self.n, self.edges)

    def in_neighbors(self, p: ProcessId) -> FrozenSet[ProcessId]:
        return self._senders.get(p, frozenset())

    def sorted_edges(self):
        return sorted(self.edges)
