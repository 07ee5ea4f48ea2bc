"""
Communication Predicate Checkers

A process p is a 2-source of a subset S when two distinct members of S hear
p in every round of the run (p may itself be one of them). The k-sources
predicate holds when every subset of k + 1 processes has a 2-source.

- p_src_holds: is p a 2-source of S
- p_srcs_holds: exhaustive check over all (k+1)-subsets, with witnesses
- min_k: smallest k for which the run is admissible
- two_source_cover: per subset, the 2-source and its two timely receivers

Everything is evaluated on the stable skeleton. Subsets are enumerated in
lexicographic order and the smallest source is reported, so reports are
deterministic.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Tuple

from rounds.exceptions import UnknownProcess
from rounds.graphs import ProcessId, RunSpec
from rounds.services import stable_skeleton
from .exceptions import ParameterOutOfRange, SubsetTooSmall

logger = logging.getLogger(__name__)

Subset = Tuple[ProcessId, ...]


@dataclass(frozen=True)
class TwoSourceWitness:
    source: ProcessId
    receivers: Tuple[ProcessId, ProcessId]


@dataclass(frozen=True)
class PredicateReport:
    """
    Outcome of an exhaustive k-sources check.

    Exactly one of witness_sources / violating_subset is set, matching holds.
    For k >= n there are no subsets: holds is True and witness_sources is empty.
    """
    n: int
    k: int
    holds: bool
    witness_sources: Optional[Dict[Subset, ProcessId]] = None
    violating_subset: Optional[Subset] = None


class TimelyReceivers:
    """
    hearers[p] is the bitmask of processes that hear p in every round, i.e.
    {q : p in PT(q)} on the stable skeleton.
    """

    def __init__(self, run: RunSpec):
        self.n = run.n
        skeleton, _ = stable_skeleton(run)
        self.hearers: List[int] = [0] * run.n
        for p, q in skeleton.edges:
            self.hearers[p] |= 1 << q

    @staticmethod
    def mask(subset: Iterable[ProcessId]) -> int:
        bits = 0
        for q in subset:
            bits |= 1 << q
        return bits

    def receivers_in(self, p: ProcessId, subset_mask: int) -> List[ProcessId]:
        common = self.hearers[p] & subset_mask
        return [q for q in range(self.n) if common >> q & 1]

    def first_source(self, subset_mask: int) -> Optional[ProcessId]:
        for p in range(self.n):
            common = self.hearers[p] & subset_mask
            # at least two bits set
            if common & (common - 1):
                return p
        return None


def _check_process(run: RunSpec, p: ProcessId) -> None:
    if not isinstance(p, int) or not 0 <= p < run.n:
        raise UnknownProcess(p, run.n)


def p_src_holds(run: RunSpec, p: ProcessId, subset: Iterable[ProcessId]) -> bool:
    """
    True iff two distinct members of subset hear p in every round.

    Raises:
        SubsetTooSmall: fewer than two distinct processes in subset
    """
    members = set(subset)
    if len(members) < 2:
        raise SubsetTooSmall(members)
    _check_process(run, p)
    for q in members:
        _check_process(run, q)
    receivers = TimelyReceivers(run)
    return len(receivers.receivers_in(p, TimelyReceivers.mask(members))) >= 2


def p_srcs_holds(run: RunSpec, k: int) -> PredicateReport:
    """Exhaustive check of every (k+1)-subset; vacuously true for k >= n."""
    if k < 1:
        raise ParameterOutOfRange('k', k, 'k >= 1')
    receivers = TimelyReceivers(run)
    witnesses: Dict[Subset, ProcessId] = {}
    for subset in combinations(range(run.n), k + 1):
        source = receivers.first_source(TimelyReceivers.mask(subset))
        if source is None:
            logger.debug(f'k={k}: subset {list(subset)} has no 2-source')
            return PredicateReport(n=run.n, k=k, holds=False, violating_subset=subset)
        witnesses[subset] = source
    return PredicateReport(n=run.n, k=k, holds=True, witness_sources=witnesses)


def min_k(run: RunSpec) -> int:
    """Smallest k >= 1 with the predicate holding; at most n (vacuous)."""
    for k in range(1, run.n):
        if p_srcs_holds(run, k).holds:
            return k
    return max(run.n, 1)


def two_source_cover(run: RunSpec, k: int) -> Dict[Subset, Optional[TwoSourceWitness]]:
    """For every (k+1)-subset: its smallest 2-source and the two smallest timely receivers, or None."""
    if k < 1:
        raise ParameterOutOfRange('k', k, 'k >= 1')
    receivers = TimelyReceivers(run)
    cover: Dict[Subset, Optional[TwoSourceWitness]] = {}
    for subset in combinations(range(run.n), k + 1):
        subset_mask = TimelyReceivers.mask(subset)
        source = receivers.first_source(subset_mask)
        if source is None:
            cover[subset] = None
        else:
            first, second = receivers.receivers_in(source, subset_mask)[:2]
            cover[subset] = TwoSourceWitness(source=source, receivers=(first, second))
    return cover
