"""
k-Set Agreement State Machine

Each process broadcasts its estimate and its approximation graph every
round. On receipt it runs four phases, always in this order:

1. update_pt: keep only senders heard in every round so far
2. handle_decide: adopt a decision relayed by a timely neighbour
3. approximate_skeleton: rebuild the approximation graph from the fresh
   timely edges and the neighbours' graphs, drop edges that are n rounds
   old and vertices that no longer reach the owner
4. update_estimate_and_decide: take the minimum estimate of the timely
   neighbours; from the decision floor on (round n, or 2n - 2 under
   DecisionRule.SETTLED), decide once the approximation graph is strongly
   connected

A decided process keeps approximating (its graph is still broadcast) but
never changes its estimate again.

Usage:
    state = init_state(p, proposal, n)
    message = send_fn(state, r)
    state = transition_fn(state, r, inbox)   # inbox: sender -> Message
    state = transition_fn(state, r, inbox, DecisionRule.SETTLED)
"""
import logging
from dataclasses import replace
from typing import Dict, Mapping, Set

from graphkit.algorithms import is_strongly_connected, prune_unreachable_to
from graphkit.digraph import Digraph
from rounds.exceptions import UnknownProcess
from rounds.graphs import Edge, ProcessId
from .exceptions import SelfMessageMissing
from .state import (
    ApproxGraph, Decision, DecisionRule, DecisionSource, Message, MessageTag, ProcessState, decision_floor,
)

logger = logging.getLogger(__name__)

Inbox = Mapping[ProcessId, Message]


def init_state(pid: ProcessId, proposal: int, n: int) -> ProcessState:
    if not 0 <= pid < n:
        raise UnknownProcess(pid, n)
    return ProcessState(
        id=pid,
        n=n,
        pt=frozenset(range(n)),
        x=proposal,
        graph=ApproxGraph.trivial(pid),
    )


def send_fn(state: ProcessState, r: int) -> Message:
    """The round-r broadcast, built from the end-of-round-(r-1) state."""
    tag = MessageTag.DECIDE if state.decided else MessageTag.PROP
    return Message(tag=tag.value, x=state.x, graph=state.graph, sender=state.id)


def transition_fn(
    state: ProcessState,
    r: int,
    inbox: Inbox,
    rule: str = DecisionRule.ROUND_N,
) -> ProcessState:
    """
    Apply all four phases for round r.

    Raises:
        SelfMessageMissing: the process did not receive its own message
    """
    if state.id not in inbox:
        raise SelfMessageMissing(state.id, r)
    state = update_pt(state, inbox)
    state = handle_decide(state, inbox, r)
    state = approximate_skeleton(state, r, inbox)
    return update_estimate_and_decide(state, r, inbox, rule)


def update_pt(state: ProcessState, inbox: Inbox) -> ProcessState:
    return replace(state, pt=state.pt & frozenset(inbox))


def handle_decide(state: ProcessState, inbox: Inbox, r: int) -> ProcessState:
    """Adopt the smallest value among decide messages from timely neighbours."""
    if state.decided:
        return state
    relayed = [inbox[q].x for q in sorted(state.pt) if inbox[q].is_decide]
    if not relayed:
        return state
    value = min(relayed)
    logger.debug(f'p{state.id} adopts decision {value} in round {r}')
    return replace(
        state,
        x=value,
        decided=True,
        decision=Decision(value=value, round=r, source=DecisionSource.RELAY.value),
    )


def approximate_skeleton(state: ProcessState, r: int, inbox: Inbox) -> ProcessState:
    """
    Rebuild the approximation graph for round r.

    Fresh edges (q -> p) for every timely q carry label r. Edges from the
    timely neighbours' graphs keep their largest label, which never beats a
    fresh one. Edges labelled r - n or lower are dropped, then every vertex
    that cannot reach the owner.
    """
    owner = state.id
    vertices: Set[ProcessId] = {owner}
    labels: Dict[Edge, int] = {}
    for q in sorted(state.pt):
        labels[(q, owner)] = r
        vertices.add(q)
        vertices.update(inbox[q].graph.vertices)

    for q in sorted(state.pt):
        for u, v, label in inbox[q].graph.edges:
            current = labels.get((u, v))
            if current is None or label > current:
                labels[(u, v)] = label

    labels = {edge: label for edge, label in labels.items() if label > r - state.n}
    reachable = prune_unreachable_to(Digraph.from_edges(vertices, labels), owner).vertices
    labels = {
        (u, v): label for (u, v), label in labels.items()
        if u in reachable and v in reachable
    }
    return replace(state, graph=ApproxGraph.from_labels(owner, reachable, labels))


def update_estimate_and_decide(
    state: ProcessState,
    r: int,
    inbox: Inbox,
    rule: str = DecisionRule.ROUND_N,
) -> ProcessState:
    """Min over the timely estimates; from the rule's floor on, decide if the graph is strongly connected."""
    if state.decided:
        return state
    x = min(inbox[q].x for q in state.pt)
    if r >= decision_floor(rule, state.n) and is_strongly_connected(state.graph.as_digraph):
        logger.debug(f'p{state.id} decides {x} in round {r}')
        return replace(
            state,
            x=x,
            decided=True,
            decision=Decision(value=x, round=r, source=DecisionSource.SELF.value),
        )
    return replace(state, x=x)
