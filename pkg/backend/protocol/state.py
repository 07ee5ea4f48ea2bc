"""
Protocol State Types

- ApproxGraph: a process's labelled approximation of the stable skeleton
- Message: what a process broadcasts at the start of a round
- Decision: the decided value, the round and how it was reached
- ProcessState: everything a process carries from one round to the next
- DecisionRule: from which round a process may decide on its own

All types are frozen; transitions build new values with dataclasses.replace,
so a sent message never changes after the fact.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from django.db import models

from graphkit.digraph import Digraph
from rounds.graphs import Edge, ProcessId
from .exceptions import MalformedApproxGraph

# (from, to, round label)
LabeledEdge = Tuple[ProcessId, ProcessId, int]


class MessageTag(models.TextChoices):
    PROP = 'prop', 'Proposal'
    DECIDE = 'decide', 'Decision'


class DecisionSource(models.TextChoices):
    SELF = 'self', 'Strongly connected approximation'
    RELAY = 'relay', 'Adopted from a decide message'


class DecisionRule(models.TextChoices):
    """
    When a strongly connected approximation may turn into a decision.

    ROUND_N decides from round n on. At that point an approximation can
    still hold in-window edges that have left the skeleton, so a process
    downstream of a root component may decide a value the root never holds
    and the run can end with more than k values. SETTLED waits until round
    2n - 2: a strongly connected approximation then lies within one
    component of round n - 1 or later, whose members share their final
    estimate.
    """
    ROUND_N = 'round-n', 'Decide from round n'
    SETTLED = 'settled', 'Decide from round 2n - 2'


def decision_floor(rule: str, n: int) -> int:
    """
    First round in which a process may decide on its own.

    Raises:
        ValueError: unknown rule
    """
    if DecisionRule(rule) == DecisionRule.SETTLED:
        return max(n, 2 * n - 2)
    return n


@dataclass(frozen=True)
class ApproxGraph:
    """
    Weighted digraph owned by one process. Edges are kept as sorted
    (from, to, label) triples, at most one per ordered pair, and always join
    vertices of the graph. The owner is always a vertex.
    """
    owner: ProcessId
    vertices: FrozenSet[ProcessId]
    edges: Tuple[LabeledEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, 'vertices', frozenset(self.vertices))
        object.__setattr__(self, 'edges', tuple(sorted(tuple(e) for e in self.edges)))
        if self.owner not in self.vertices:
            raise MalformedApproxGraph(self.owner, 'owner is not a vertex')
        pairs = set()
        for u, v, _ in self.edges:
            if u not in self.vertices or v not in self.vertices:
                raise MalformedApproxGraph(self.owner, f'edge {u}->{v} leaves the vertex set')
            if (u, v) in pairs:
                raise MalformedApproxGraph(self.owner, f'edge {u}->{v} carries two labels')
            pairs.add((u, v))

    @classmethod
    def trivial(cls, owner: ProcessId) -> 'ApproxGraph':
        return cls(owner=owner, vertices=frozenset({owner}), edges=())

    @classmethod
    def from_labels(
        cls,
        owner: ProcessId,
        vertices: Iterable[ProcessId],
        labels: Mapping[Edge, int],
    ) -> 'ApproxGraph':
        return cls(
            owner=owner,
            vertices=frozenset(vertices),
            edges=tuple((u, v, label) for (u, v), label in labels.items()),
        )

    @cached_property
    def labels(self) -> Dict[Edge, int]:
        return {(u, v): label for u, v, label in self.edges}

    def label(self, u: ProcessId, v: ProcessId) -> Optional[int]:
        return self.labels.get((u, v))

    @cached_property
    def as_digraph(self) -> Digraph:
        """Unlabelled view used for reachability and strong connectivity."""
        return Digraph.from_edges(self.vertices, self.labels)

    def sorted_vertices(self):
        return sorted(self.vertices)


@dataclass(frozen=True)
class Message:
    tag: str
    x: int
    graph: ApproxGraph
    sender: ProcessId

    @property
    def is_decide(self) -> bool:
        return self.tag == MessageTag.DECIDE


@dataclass(frozen=True)
class Decision:
    value: int
    round: int
    source: str


@dataclass(frozen=True)
class ProcessState:
    id: ProcessId
    n: int
    pt: FrozenSet[ProcessId]
    x: int
    graph: ApproxGraph
    decided: bool = False
    decision: Optional[Decision] = None
