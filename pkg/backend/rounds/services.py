"""
Run Model Services

Operations over eventually-constant runs:
- round_graph / skeleton_at / stable_skeleton / timely_neighborhood
- SkeletonTracker: cached per-round skeletons and "timely until" lookups,
  the ground truth the trace verifiers compare process states against
- Timely neighbourhoods derived from Heard-Of sets or from round-by-round
  fault-detector outputs
- Run builders: complete, self-loops only, from Heard-Of sets, and crashes
  modelled as silence

Because every round after the prefix repeats the tail graph, the skeleton can
only shrink during rounds 1..L+1; from round L+1 on it equals the stable
skeleton, which is therefore exactly computable.
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exceptions import RoundOutOfRange, UnknownProcess
from .graphs import Edge, ProcessId, RoundGraph, RunSpec, SkeletonGraph

logger = logging.getLogger(__name__)

# Round marker for "every round of the run"
STABLE = None


def _check_round(r: int) -> None:
    if r is None or r < 1:
        raise RoundOutOfRange(r)


def _check_process(run: RunSpec, p: ProcessId) -> None:
    if not isinstance(p, int) or not 0 <= p < run.n:
        raise UnknownProcess(p, run.n)


def round_graph(run: RunSpec, r: int) -> RoundGraph:
    """Communication graph of round r (prefix for r <= L, tail afterwards)."""
    _check_round(r)
    if r <= run.prefix_length:
        return run.prefix[r - 1]
    return run.tail


def skeleton_at(run: RunSpec, r: int) -> SkeletonGraph:
    """Edges present in every round 1..r."""
    _check_round(r)
    edges = set(round_graph(run, 1).edges)
    # Rounds past L+1 repeat the tail and cannot remove anything.
    for i in range(2, min(r, run.prefix_length + 1) + 1):
        edges &= round_graph(run, i).edges
    return SkeletonGraph(n=run.n, edges=frozenset(edges), as_of_round=r)


def stable_skeleton(run: RunSpec) -> Tuple[SkeletonGraph, int]:
    """
    Intersection over all rounds, plus the smallest round r_ST from which
    skeleton_at(run, r) equals it.
    """
    edges = set(round_graph(run, 1).edges)
    stabilization_round = 1
    for r in range(2, run.prefix_length + 2):
        shrunk = edges & round_graph(run, r).edges
        if shrunk != edges:
            stabilization_round = r
            edges = shrunk
    return SkeletonGraph(n=run.n, edges=frozenset(edges), as_of_round=STABLE), stabilization_round


def timely_neighborhood(run: RunSpec, p: ProcessId, r: Optional[int] = STABLE) -> FrozenSet[ProcessId]:
    """PT(p, r): processes p heard from in every round up to r (every round, for STABLE)."""
    _check_process(run, p)
    if r is STABLE:
        skeleton, _ = stable_skeleton(run)
    else:
        skeleton = skeleton_at(run, r)
    return skeleton.in_neighbors(p)


class SkeletonTracker:
    """
    Cached ground truth for one run.

    Usage:
        tracker = SkeletonTracker(run)
        tracker.skeleton(5)                 # SkeletonGraph of round 5
        tracker.pt(p, 5)                    # PT(p, 5)
        tracker.is_timely(q, p, 3)          # q in PT(p, 3)
        tracker.stabilization_round         # r_ST
    """

    def __init__(self, run: RunSpec):
        self.run = run
        self.stable, self.stabilization_round = stable_skeleton(run)
        self._skeletons: Dict[int, SkeletonGraph] = {}
        self._timely_until: Dict[Edge, Optional[int]] = self._compute_timely_until()

    def _compute_timely_until(self) -> Dict[Edge, Optional[int]]:
        """
        For every pair (q, p): the last round s with q in PT(p, s), 0 if q was
        never timely for p, STABLE if q stays timely forever.
        """
        run = self.run
        until: Dict[Edge, Optional[int]] = {}
        alive = set(round_graph(run, 1).edges)
        for q in range(run.n):
            for p in range(run.n):
                if (q, p) not in alive:
                    until[(q, p)] = 0
        for r in range(2, run.prefix_length + 2):
            present = round_graph(run, r).edges
            for edge in sorted(alive - present):
                until[edge] = r - 1
            alive &= present
        for edge in alive:
            until[edge] = STABLE
        return until

    def skeleton(self, r: int) -> SkeletonGraph:
        _check_round(r)
        if r not in self._skeletons:
            if r > self.stabilization_round:
                self._skeletons[r] = SkeletonGraph(n=self.run.n, edges=self.stable.edges, as_of_round=r)
            else:
                self._skeletons[r] = skeleton_at(self.run, r)
        return self._skeletons[r]

    def pt(self, p: ProcessId, r: Optional[int] = STABLE) -> FrozenSet[ProcessId]:
        if r is STABLE:
            return self.stable.in_neighbors(p)
        return self.skeleton(r).in_neighbors(p)

    def timely_until(self, q: ProcessId, p: ProcessId) -> Optional[int]:
        return self._timely_until[(q, p)]

    def is_timely(self, q: ProcessId, p: ProcessId, s: int) -> bool:
        """q in PT(p, s)."""
        until = self._timely_until[(q, p)]
        return s >= 1 and (until is STABLE or s <= until)

    def window_round(self, length: int) -> int:
        """Earliest round r whose skeleton is unchanged over [r, r + length - 1]."""
        r = 1
        while self.skeleton(r).edges != self.skeleton(r + max(length, 1) - 1).edges:
            r += 1
        return r


# ============================================================================
# Timely neighbourhoods from other round-by-round models
# ============================================================================

def pt_from_heard_of(
    n: int,
    heard_of_history: Sequence[Mapping[ProcessId, Iterable[ProcessId]]],
) -> Dict[ProcessId, FrozenSet[ProcessId]]:
    """
    PT(p, r) as the intersection of HO(p, 1..r).

    heard_of_history[i] maps each process to the senders it heard in round
    i + 1; a process missing from a round heard nobody.
    """
    pt = {p: frozenset(range(n)) for p in range(n)}
    for heard_of in heard_of_history:
        for p in range(n):
            pt[p] = pt[p] & frozenset(heard_of.get(p, ()))
    return pt


def pt_from_suspicions(
    n: int,
    suspicion_history: Sequence[Mapping[ProcessId, Iterable[ProcessId]]],
) -> Dict[ProcessId, FrozenSet[ProcessId]]:
    """PT(p, r) as all processes minus everything p's fault detector output in rounds 1..r."""
    suspected = {p: set() for p in range(n)}
    for outputs in suspicion_history:
        for p, qs in outputs.items():
            suspected[p].update(qs)
    return {p: frozenset(range(n)) - frozenset(suspected[p]) for p in range(n)}


# ============================================================================
# Run builders
# ============================================================================

def complete_run(n: int) -> RunSpec:
    return RunSpec.constant(RoundGraph.complete(n))


def self_loop_run(n: int) -> RunSpec:
    return RunSpec.constant(RoundGraph.self_loops(n))


def _graph_from_heard_of(n: int, heard_of: Mapping[ProcessId, Iterable[ProcessId]]) -> RoundGraph:
    return RoundGraph.from_edges(n, ((q, p) for p, qs in heard_of.items() for q in qs))


def run_from_heard_of(
    n: int,
    heard_of_prefix: Sequence[Mapping[ProcessId, Iterable[ProcessId]]],
    heard_of_tail: Mapping[ProcessId, Iterable[ProcessId]],
) -> RunSpec:
    """Communication graphs with (q -> p) iff q is in HO(p, r); self-loops added."""
    return RunSpec(
        n=n,
        prefix=tuple(_graph_from_heard_of(n, ho) for ho in heard_of_prefix),
        tail=_graph_from_heard_of(n, heard_of_tail),
    )


def silence_after(run: RunSpec, crash_rounds: Mapping[ProcessId, int]) -> RunSpec:
    """
    Crash p at round c: from round c on nobody else hears p, while p keeps
    hearing itself (a crashed process stays "internally correct").

    The prefix is extended up to the latest crash round so the result is
    again eventually constant.
    """
    for p, c in crash_rounds.items():
        _check_process(run, p)
        _check_round(c)
    if not crash_rounds:
        return run

    def silenced(g: RoundGraph, r: int) -> RoundGraph:
        dead = {p for p, c in crash_rounds.items() if r >= c}
        return RoundGraph.from_edges(
            run.n, (e for e in g.edges if e[0] not in dead or e[0] == e[1]),
        )

    length = max(run.prefix_length, max(crash_rounds.values()) - 1)
    prefix: List[RoundGraph] = [silenced(round_graph(run, r), r) for r in range(1, length + 1)]
    tail = silenced(run.tail, length + 1)
    logger.debug(f'Silenced {sorted(crash_rounds)} over a prefix of {length} rounds')
    return RunSpec(n=run.n, prefix=tuple(prefix), tail=tail)
