"""
Round Executor

Lock-step execution of the k-set agreement protocol over an
eventually-constant run:

1. every process computes its round-r message from its end-of-round-(r-1)
   state
2. messages are delivered along the edges of round_graph(run, r)
3. every process applies transition_fn to the messages it received

Execution stops once every process has decided, or raises HorizonExceeded
after the last allowed round. Identical inputs give identical traces.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional

from django.conf import settings

from protocol.algorithm import init_state, send_fn, transition_fn
from protocol.state import Decision, DecisionRule, Message, ProcessState
from rounds.exceptions import RoundOutOfRange, UnknownProcess
from rounds.graphs import Edge, ProcessId, RunSpec
from rounds.services import round_graph
from .exceptions import HorizonExceeded, InvalidProposals

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoundRecord:
    """
    One simulated round. sent holds each process's broadcast, delivered the
    (sender, receiver) pairs that got it.
    """
    r: int
    sent: Dict[ProcessId, Message]
    delivered: FrozenSet[Edge]
    states_after: Dict[ProcessId, ProcessState]

    def message(self, sender: ProcessId, receiver: ProcessId) -> Optional[Message]:
        if (sender, receiver) in self.delivered:
            return self.sent[sender]
        return None

    def inbox(self, receiver: ProcessId) -> Dict[ProcessId, Message]:
        return {q: self.sent[q] for q, p in sorted(self.delivered) if p == receiver}


@dataclass
class Trace:
    run: RunSpec
    proposals: Dict[ProcessId, int]
    horizon: int
    rounds: List[RoundRecord] = field(default_factory=list)
    decisions: Dict[ProcessId, Decision] = field(default_factory=dict)
    rule: str = DecisionRule.ROUND_N.value

    @property
    def n(self) -> int:
        return self.run.n

    @property
    def last_round(self) -> int:
        return len(self.rounds)

    @property
    def complete(self) -> bool:
        """Every process decided."""
        return len(self.decisions) == self.run.n

    def record(self, r: int) -> RoundRecord:
        if not 1 <= r <= self.last_round:
            raise RoundOutOfRange(r, f'trace covers rounds 1..{self.last_round}')
        return self.rounds[r - 1]

    def state(self, p: ProcessId, r: int) -> ProcessState:
        """State of p at the end of round r; r = 0 gives the initial state."""
        if not 0 <= p < self.run.n:
            raise UnknownProcess(p, self.run.n)
        if r == 0:
            return init_state(p, self.proposals[p], self.run.n)
        return self.record(r).states_after[p]

    def undecided(self) -> List[ProcessId]:
        return [p for p in range(self.run.n) if p not in self.decisions]


def default_horizon(run: RunSpec) -> int:
    """L + 3n + slack: skeleton settled by L + 1, then n - 1 window rounds and 2n - 1 for decisions."""
    slack = getattr(settings, 'KSET_HORIZON_SLACK', 1)
    return run.prefix_length + 3 * run.n + slack


def validate_proposals(run: RunSpec, proposals: Mapping[ProcessId, int]) -> Dict[ProcessId, int]:
    """
    Raises:
        InvalidProposals: keys differ from 0..n-1 or a value is not a natural number
    """
    if set(proposals) != set(range(run.n)):
        raise InvalidProposals(f'expected values for processes 0..{run.n - 1}, got {sorted(proposals)}')
    for p, value in proposals.items():
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise InvalidProposals(f'proposal of process {p} must be a natural number, got {value!r}')
    return {p: proposals[p] for p in range(run.n)}


class RoundExecutor:
    """
    Steps the protocol one round at a time.

    Usage:
        executor = RoundExecutor(run, proposals)
        trace = executor.run_to_completion()

        # or round by round
        record = executor.step()

        # deciding from round 2n - 2 instead of n (default: KSET_DECISION_RULE)
        executor = RoundExecutor(run, proposals, rule=DecisionRule.SETTLED)
    """

    def __init__(
        self,
        run: RunSpec,
        proposals: Mapping[ProcessId, int],
        horizon: Optional[int] = None,
        rule: Optional[str] = None,
    ):
        self.run = run
        proposals = validate_proposals(run, proposals)
        if horizon is None:
            horizon = default_horizon(run)
        if horizon < 1:
            raise RoundOutOfRange(horizon, 'horizon must be at least 1')
        if rule is None:
            rule = getattr(settings, 'KSET_DECISION_RULE', DecisionRule.ROUND_N)
        self.trace = Trace(run=run, proposals=proposals, horizon=horizon, rule=DecisionRule(rule).value)
        self.states: Dict[ProcessId, ProcessState] = {
            p: init_state(p, proposals[p], run.n) for p in range(run.n)
        }

    @property
    def current_round(self) -> int:
        return self.trace.last_round

    def step(self) -> RoundRecord:
        r = self.current_round + 1
        graph = round_graph(self.run, r)
        sent = {p: send_fn(state, r) for p, state in self.states.items()}

        states_after = {}
        for p, state in self.states.items():
            inbox = {q: sent[q] for q in sorted(graph.in_neighbors(p))}
            states_after[p] = transition_fn(state, r, inbox, self.trace.rule)

        record = RoundRecord(r=r, sent=sent, delivered=graph.edges, states_after=states_after)
        self.trace.rounds.append(record)
        for p, state in states_after.items():
            if state.decided and p not in self.trace.decisions:
                self.trace.decisions[p] = state.decision
        self.states = states_after
        logger.debug(f'Round {r}: {len(self.trace.decisions)}/{self.run.n} decided')
        return record

    def run_to_completion(self) -> Trace:
        """
        Raises:
            HorizonExceeded: with the partial trace attached
        """
        while not self.trace.complete:
            if self.current_round >= self.trace.horizon:
                undecided = self.trace.undecided()
                logger.warning(f'Horizon {self.trace.horizon} reached with {undecided} undecided')
                raise HorizonExceeded(undecided, self.trace.horizon, self.trace)
            self.step()
        logger.info(
            f'Simulation of n={self.run.n} finished after {self.current_round} rounds '
            f'with {len({d.value for d in self.trace.decisions.values()})} distinct values'
        )
        return self.trace


def execute(
    run: RunSpec,
    proposals: Mapping[ProcessId, int],
    horizon: Optional[int] = None,
    rule: Optional[str] = None,
) -> Trace:
    return RoundExecutor(run, proposals, horizon, rule).run_to_completion()
