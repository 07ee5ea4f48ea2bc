"""
Trace Verifiers

Every check recomputes its ground truth (timely neighbourhoods, skeletons,
components) from the trace's RunSpec and compares it with the recorded
process states; nothing is read back from the protocol itself.

Suites:
- check_validity / check_k_agreement / check_termination_bound
- verify_approximation: approximation-graph properties that hold in every
  run, whatever the communication predicate
- verify_agreement_structure: root components vs. decisions, for runs
  satisfying the k-sources predicate
- verify_estimates: estimate and decision bookkeeping that holds in every run

Each suite returns a Verdict with a per-check breakdown and the first
counterexample found. corrupt_label builds mutated traces for negative
controls; decision_summary condenses a trace for display.
"""
import logging
import random
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Optional

import networkx as nx
from django.db import models

from graphkit.algorithms import is_strongly_connected, root_components, scc_partition
from graphkit.digraph import Digraph, SccPartition
from predicates.services import p_srcs_holds
from protocol.state import ApproxGraph, DecisionSource, decision_floor
from rounds.graphs import ProcessId
from rounds.services import SkeletonTracker
from .engine import RoundRecord, Trace
from .exceptions import PredicateNotSatisfied

logger = logging.getLogger(__name__)


class CheckId(models.TextChoices):
    VALIDITY = 'validity', 'Decisions are proposals'
    K_AGREEMENT = 'k_agreement', 'At most k distinct decisions'
    TERMINATION_BOUND = 'termination_bound', 'Everybody decides within the round bound'
    LABEL_WINDOW = 'label_window', 'Owner present, labels within the last n rounds'
    TIMELY_EDGES = 'timely_edges', 'Timely neighbourhood and fresh edges match the run'
    PATH_PROPAGATION = 'path_propagation', 'Timely edges travel along skeleton paths'
    COMPONENT_COVERAGE = 'component_coverage', 'Approximation covers own component'
    EDGE_VALIDITY = 'edge_validity', 'Every labelled edge was timely at its label'
    COMPONENT_BOUND = 'component_bound', 'Strongly connected approximation lies in an earlier component'
    COMPONENT_CLOSURE = 'component_closure', 'Strongly connected approximation is closed under stable components'
    ROOT_BOUND = 'root_bound', 'At most k root components'
    ESTIMATE_AGREEMENT = 'estimate_agreement', 'Equal estimates inside round-n components'
    ROOT_CORRESPONDENCE = 'root_correspondence', 'No more decisions than root components'
    DECISION_PROVENANCE = 'decision_provenance', 'Relayed decisions come from earlier own decisions'
    NO_EARLY_DECISION = 'no_early_decision', 'Nobody decides before the decision floor'
    SINGLE_DECISION = 'single_decision', 'Decisions are made once and kept'
    ESTIMATE_VALIDITY = 'estimate_validity', 'Estimates are proposals'
    ESTIMATE_MONOTONICITY = 'estimate_monotonicity', 'Minimum updates never raise the estimate'
    ESTIMATE_STABILITY = 'estimate_stability', 'Estimates settle after round n - 1'


@dataclass(frozen=True)
class Counterexample:
    check: str
    process: Optional[ProcessId]
    round: Optional[int]
    detail: str


@dataclass
class Verdict:
    suite: str
    checks: Dict[str, bool]
    counterexample: Optional[Counterexample] = None
    facts: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed_checks(self) -> List[str]:
        return [check for check, ok in self.checks.items() if not ok]


class VerdictBuilder:
    """Collects the first failure per check; later failures of a failed check are ignored."""

    def __init__(self, suite: str, checks: Iterable[str]):
        self.suite = suite
        self.checks = {str(check): True for check in checks}
        self.first: Optional[Counterexample] = None
        self.facts: Dict[str, Any] = {}

    def active(self, check: str) -> bool:
        return self.checks[str(check)]

    def fail(self, check: str, detail: str, process: Optional[ProcessId] = None, round_number: Optional[int] = None):
        check = str(check)
        if not self.checks[check]:
            return
        self.checks[check] = False
        counterexample = Counterexample(check=check, process=process, round=round_number, detail=detail)
        logger.debug(f'{self.suite}: {check} failed at p={process} r={round_number}: {detail}')
        if self.first is None:
            self.first = counterexample

    def verdict(self) -> Verdict:
        return Verdict(suite=self.suite, checks=dict(self.checks), counterexample=self.first, facts=self.facts)


# ============================================================================
# Validity, agreement, termination
# ============================================================================

def check_validity(trace: Trace) -> Verdict:
    builder = VerdictBuilder('validity', [CheckId.VALIDITY])
    proposed = set(trace.proposals.values())
    for p, decision in sorted(trace.decisions.items()):
        if decision.value not in proposed:
            builder.fail(CheckId.VALIDITY, f'decided {decision.value}, which nobody proposed', p, decision.round)
    return builder.verdict()


def check_k_agreement(trace: Trace, k: int) -> Verdict:
    builder = VerdictBuilder('k_agreement', [CheckId.K_AGREEMENT])
    values = sorted({decision.value for decision in trace.decisions.values()})
    builder.facts.update({'k': k, 'distinct_values': values})
    if len(values) > k:
        builder.fail(CheckId.K_AGREEMENT, f'{len(values)} distinct decisions {values} exceed k={k}')
    return builder.verdict()


def check_termination_bound(trace: Trace) -> Verdict:
    """
    Every process decides by max(f, r* + n - 1) + n, where r* is the round
    from which the skeleton never changes again and f the trace's decision
    floor. For the round-n rule this is r* + 2n - 1. The earliest n-round
    constant window is reported as well.
    """
    builder = VerdictBuilder('termination_bound', [CheckId.TERMINATION_BOUND])
    tracker = SkeletonTracker(trace.run)
    n = trace.n
    r_star = tracker.stabilization_round
    floor = decision_floor(trace.rule, n)
    bound = max(floor, r_star + n - 1) + n
    builder.facts.update({
        'r_star': r_star,
        'window_round': tracker.window_round(n),
        'decision_floor': floor,
        'bound': bound,
    })
    for p in range(n):
        decision = trace.decisions.get(p)
        if decision is None:
            builder.fail(CheckId.TERMINATION_BOUND, f'undecided after round {trace.last_round}', p)
        elif decision.round > bound:
            builder.fail(CheckId.TERMINATION_BOUND, f'decided in round {decision.round} > {bound}', p, decision.round)
    return builder.verdict()


# ============================================================================
# Approximation graph properties
# ============================================================================

class _RoundTruth:
    """Skeleton of one round with its components and distances to each process."""

    def __init__(self, tracker: SkeletonTracker, r: int):
        n = tracker.run.n
        self.edges = tracker.skeleton(r).edges
        self.graph = Digraph.over_processes(n, self.edges)
        self.partition: SccPartition = scc_partition(self.graph)
        reverse = self.graph.nx_graph.reverse(copy=False)
        # distance[p][p1]: length of a shortest p1 ~> p path, at most n - 1
        self.distance = {
            p: nx.single_source_shortest_path_length(reverse, p, cutoff=n - 1)
            for p in range(n)
        }

    def component(self, p: ProcessId):
        comp = self.partition.component_containing(p)
        return comp, {(u, v) for u, v in self.edges if u in comp and v in comp}


def _contains(graph: ApproxGraph, vertices, edges) -> bool:
    return vertices <= graph.vertices and all(edge in graph.labels for edge in edges)


def verify_approximation(trace: Trace) -> Verdict:
    builder = VerdictBuilder('approximation', [
        CheckId.LABEL_WINDOW, CheckId.TIMELY_EDGES, CheckId.PATH_PROPAGATION,
        CheckId.COMPONENT_COVERAGE, CheckId.EDGE_VALIDITY, CheckId.COMPONENT_BOUND,
        CheckId.COMPONENT_CLOSURE,
    ])
    run, n = trace.run, trace.n
    tracker = SkeletonTracker(run)
    stable = Digraph.over_processes(n, tracker.stable.edges)
    stable_partition = scc_partition(stable)
    truths = {r: _RoundTruth(tracker, r) for r in range(1, trace.last_round + 1)}

    for record in trace.rounds:
        r = record.r
        truth = truths[r]
        for p in range(n):
            state = record.states_after[p]
            graph = state.graph
            _check_label_window(builder, p, r, n, graph)
            _check_timely_edges(builder, tracker, p, r, n, state)
            _check_edge_validity(builder, tracker, p, r, graph)
            if r < n:
                continue
            strongly_connected = is_strongly_connected(graph.as_digraph)
            _check_path_propagation(builder, tracker, truth, p, r, n, graph)

            comp, comp_edges = truth.component(p)
            if builder.active(CheckId.COMPONENT_COVERAGE) and not _contains(graph, comp, comp_edges):
                builder.fail(CheckId.COMPONENT_COVERAGE, f'own component {sorted(comp)} not covered', p, r)

            if not strongly_connected:
                continue
            earlier = truths[r - n + 1]
            bound_comp, bound_edges = earlier.component(p)
            if builder.active(CheckId.COMPONENT_BOUND):
                outside = sorted(graph.vertices - bound_comp)
                extra = sorted(set(graph.labels) - bound_edges)
                if outside or extra:
                    builder.fail(
                        CheckId.COMPONENT_BOUND,
                        f'exceeds round-{r - n + 1} component: vertices {outside}, edges {extra}', p, r,
                    )
            if builder.active(CheckId.COMPONENT_CLOSURE):
                for q in graph.sorted_vertices():
                    stable_comp = stable_partition.component_containing(q)
                    stable_edges = {(u, v) for u, v in stable.edges if u in stable_comp and v in stable_comp}
                    if not _contains(graph, stable_comp, stable_edges):
                        builder.fail(
                            CheckId.COMPONENT_CLOSURE,
                            f'stable component {sorted(stable_comp)} of p{q} not contained', p, r,
                        )
                        break
    return builder.verdict()


def _check_label_window(builder, p, r, n, graph: ApproxGraph):
    if not builder.active(CheckId.LABEL_WINDOW):
        return
    if graph.owner != p or p not in graph.vertices:
        builder.fail(CheckId.LABEL_WINDOW, f'graph owned by p{graph.owner} lacks p{p}', p, r)
        return
    for u, v, label in graph.edges:
        if not r - n < label <= r:
            builder.fail(CheckId.LABEL_WINDOW, f'edge {u}->{v} labelled {label} outside ({r - n}, {r}]', p, r)
            return


def _check_timely_edges(builder, tracker, p, r, n, state):
    if not builder.active(CheckId.TIMELY_EDGES):
        return
    expected = tracker.pt(p, r)
    if state.pt != expected:
        builder.fail(CheckId.TIMELY_EDGES, f'PT {sorted(state.pt)} differs from {sorted(expected)}', p, r)
        return
    for q in range(n):
        fresh = state.graph.label(q, p) == r
        if fresh != (q in expected):
            builder.fail(
                CheckId.TIMELY_EDGES,
                f'edge {q}->{p} labelled {state.graph.label(q, p)} while timely={q in expected}', p, r,
            )
            return


def _check_edge_validity(builder, tracker, p, r, graph: ApproxGraph):
    if not builder.active(CheckId.EDGE_VALIDITY):
        return
    for u, v, label in graph.edges:
        if not (0 <= u < tracker.run.n and 0 <= v < tracker.run.n) or not tracker.is_timely(u, v, label):
            builder.fail(CheckId.EDGE_VALIDITY, f'edge {u}->{v} labelled {label} was not timely then', p, r)
            return


def _check_path_propagation(builder, tracker, truth: _RoundTruth, p, r, n, graph: ApproxGraph):
    """
    For p1 at distance d <= n - 1 from p and q timely for p1 up to round r - l
    (smallest such l >= d, at most n - 1), p must hold (q -> p1) labelled in
    [r - l, r].
    """
    if not builder.active(CheckId.PATH_PROPAGATION):
        return
    for p1, d in sorted(truth.distance[p].items()):
        for q in range(n):
            until = tracker.timely_until(q, p1)
            if until == 0:
                continue
            length = d if until is None else max(d, r - until)
            if length > n - 1:
                continue
            label = graph.label(q, p1)
            if label is None or not r - length <= label <= r:
                builder.fail(
                    CheckId.PATH_PROPAGATION,
                    f'edge {q}->{p1} labelled {label}, expected within [{r - length}, {r}]', p, r,
                )
                return


# ============================================================================
# Agreement structure
# ============================================================================

def verify_agreement_structure(trace: Trace, k: int) -> Verdict:
    """
    Raises:
        PredicateNotSatisfied: the run does not satisfy the k-sources predicate
    """
    report = p_srcs_holds(trace.run, k)
    if not report.holds:
        raise PredicateNotSatisfied(k, report.violating_subset)

    builder = VerdictBuilder('agreement_structure', [
        CheckId.ROOT_BOUND, CheckId.ESTIMATE_AGREEMENT, CheckId.ROOT_CORRESPONDENCE, CheckId.DECISION_PROVENANCE,
    ])
    n = trace.n
    tracker = SkeletonTracker(trace.run)
    roots = root_components(Digraph.over_processes(n, tracker.stable.edges))
    values = sorted({decision.value for decision in trace.decisions.values()})
    builder.facts.update({'k': k, 'root_components': [sorted(c) for c in roots], 'distinct_values': values})

    if len(roots) > k:
        builder.fail(CheckId.ROOT_BOUND, f'{len(roots)} root components exceed k={k}')

    if trace.last_round < n:
        builder.fail(CheckId.ESTIMATE_AGREEMENT, f'trace ends at round {trace.last_round} before round {n}')
    else:
        partition = scc_partition(Digraph.over_processes(n, tracker.skeleton(n).edges))
        for comp in partition.components:
            estimates = {q: trace.state(q, n).x for q in sorted(comp)}
            if len(set(estimates.values())) > 1:
                builder.fail(CheckId.ESTIMATE_AGREEMENT, f'estimates {estimates} differ in {sorted(comp)}', min(comp), n)
                break

    if len(values) > len(roots):
        builder.fail(CheckId.ROOT_CORRESPONDENCE, f'{len(values)} decision values but {len(roots)} root components')

    own = [(p, d) for p, d in trace.decisions.items() if d.source == DecisionSource.SELF]
    for p, decision in sorted(trace.decisions.items()):
        if decision.source != DecisionSource.RELAY:
            continue
        if not any(q != p and d.value == decision.value and d.round < decision.round for q, d in own):
            builder.fail(
                CheckId.DECISION_PROVENANCE,
                f'relayed {decision.value} without an earlier own decision on it', p, decision.round,
            )
    return builder.verdict()


# ============================================================================
# Estimates and decisions
# ============================================================================

def verify_estimates(trace: Trace) -> Verdict:
    builder = VerdictBuilder('estimates', [
        CheckId.NO_EARLY_DECISION, CheckId.SINGLE_DECISION, CheckId.ESTIMATE_VALIDITY,
        CheckId.ESTIMATE_MONOTONICITY, CheckId.ESTIMATE_STABILITY,
    ])
    n = trace.n
    floor = decision_floor(trace.rule, n)
    proposed = set(trace.proposals.values())
    for p in range(n):
        final = trace.decisions.get(p)
        relays = final is not None and final.source == DecisionSource.RELAY
        for r in range(1, trace.last_round + 1):
            prev, cur = trace.state(p, r - 1), trace.state(p, r)

            if cur.x not in proposed:
                builder.fail(CheckId.ESTIMATE_VALIDITY, f'estimate {cur.x} is nobody\'s proposal', p, r)

            if prev.decided:
                if not cur.decided or cur.decision != prev.decision or cur.x != prev.x:
                    builder.fail(CheckId.SINGLE_DECISION, 'decision or estimate changed after deciding', p, r)
                continue

            if cur.decided:
                if cur.decision is None or cur.decision.value != cur.x or cur.decision.round != r:
                    builder.fail(CheckId.SINGLE_DECISION, f'decision record {cur.decision} inconsistent', p, r)
                elif cur.decision != final:
                    builder.fail(CheckId.SINGLE_DECISION, f'trace lists {final}, state has {cur.decision}', p, r)
                if r < floor:
                    builder.fail(CheckId.NO_EARLY_DECISION, f'decided in round {r} before round {floor}', p, r)
                if cur.decision is not None and cur.decision.source == DecisionSource.RELAY:
                    continue

            if cur.x > prev.x:
                builder.fail(CheckId.ESTIMATE_MONOTONICITY, f'estimate rose from {prev.x} to {cur.x}', p, r)
            if not relays and r - 1 >= n - 1 and cur.x != prev.x:
                builder.fail(CheckId.ESTIMATE_STABILITY, f'estimate moved from {prev.x} to {cur.x}', p, r)

        if trace.complete and final is None:
            builder.fail(CheckId.SINGLE_DECISION, 'complete trace without a decision', p)
    return builder.verdict()


def run_all_checks(trace: Trace, k: Optional[int] = None) -> List[Verdict]:
    """
    The unconditional suites, then k-agreement when k is given, then the
    agreement structure when the run also satisfies the k-sources predicate.
    """
    verdicts = [
        check_validity(trace),
        check_termination_bound(trace),
        verify_approximation(trace),
        verify_estimates(trace),
    ]
    if k is not None:
        verdicts.append(check_k_agreement(trace, k))
        if p_srcs_holds(trace.run, k).holds:
            verdicts.append(verify_agreement_structure(trace, k))
        else:
            logger.info(f'Agreement structure skipped: run does not satisfy the {k}-sources predicate')
    return verdicts


# ============================================================================
# Mutation control and summaries
# ============================================================================

def corrupt_label(trace: Trace, seed: int) -> Trace:
    """
    Copy of trace with one recorded label moved out of its window (to r + 1
    or r - n). The chosen round and process are drawn from seed.
    """
    rng = random.Random(f'corrupt:{seed}')
    record = trace.rounds[rng.randrange(trace.last_round)]
    p = rng.randrange(trace.n)
    state = record.states_after[p]
    u, v, _ = rng.choice(state.graph.edges)
    label = rng.choice((record.r + 1, record.r - trace.n))
    labels = dict(state.graph.labels)
    labels[(u, v)] = label
    graph = ApproxGraph.from_labels(state.graph.owner, state.graph.vertices, labels)

    states_after = dict(record.states_after)
    states_after[p] = replace(state, graph=graph)
    rounds = list(trace.rounds)
    rounds[record.r - 1] = RoundRecord(
        r=record.r, sent=record.sent, delivered=record.delivered, states_after=states_after,
    )
    logger.debug(f'Corrupted {u}->{v} of p{p} in round {record.r} to label {label}')
    return Trace(
        run=trace.run,
        proposals=dict(trace.proposals),
        horizon=trace.horizon,
        rounds=rounds,
        decisions=dict(trace.decisions),
        rule=trace.rule,
    )


def decision_summary(trace: Trace) -> Dict[str, Any]:
    values: Dict[int, int] = {}
    rounds: Dict[int, int] = {}
    for decision in trace.decisions.values():
        values[decision.value] = values.get(decision.value, 0) + 1
        rounds[decision.round] = rounds.get(decision.round, 0) + 1
    decided_rounds = sorted(rounds)
    return {
        'n': trace.n,
        'rounds_simulated': trace.last_round,
        'decided': len(trace.decisions),
        'undecided': trace.undecided(),
        'distinct_values': sorted(values),
        'value_histogram': {str(v): c for v, c in sorted(values.items())},
        'round_histogram': {str(r): c for r, c in sorted(rounds.items())},
        'first_decision_round': decided_rounds[0] if decided_rounds else None,
        'last_decision_round': decided_rounds[-1] if decided_rounds else None,
    }
