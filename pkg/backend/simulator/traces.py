"""
Trace file I/O.

dump_trace/load_trace convert between Trace and its JSON form (see
simulator.serializers); read_trace/write_trace add the canonical file
handling of common.utils.jsonio.
"""
import logging
from typing import Any, Dict

from common.utils.jsonio import read_json, write_json
from protocol.algorithm import init_state
from protocol.serializers import DecisionSerializer, ProcessStateSerializer
from protocol.state import Message
from rounds.serializers import RunSpecSerializer
from rounds.services import round_graph
from .engine import RoundRecord, Trace
from .exceptions import TraceFormatError
from .serializers import TraceSerializer

logger = logging.getLogger(__name__)


def _dump_round(record: RoundRecord) -> Dict[str, Any]:
    return {
        'round': record.r,
        'sent': [
            {'sender': p, 'tag': str(message.tag), 'x': message.x}
            for p, message in sorted(record.sent.items())
        ],
        'delivered': [list(edge) for edge in sorted(record.delivered)],
        'states': ProcessStateSerializer(
            [state for _, state in sorted(record.states_after.items())], many=True,
        ).data,
    }


def dump_trace(trace: Trace) -> Dict[str, Any]:
    return {
        'run': RunSpecSerializer.represent(trace.run),
        'proposals': {str(p): v for p, v in sorted(trace.proposals.items())},
        'horizon': trace.horizon,
        'decision_rule': trace.rule,
        'complete': trace.complete,
        'rounds': [_dump_round(record) for record in trace.rounds],
        'decisions': {str(p): DecisionSerializer(d).data for p, d in sorted(trace.decisions.items())},
    }


def load_trace(data: Any) -> Trace:
    """
    Validate decoded JSON and rebuild the Trace.

    Raises:
        TraceFormatError: with the serializer's error dict, or when a round's
            deliveries disagree with the run
    """
    serializer = TraceSerializer(data=data)
    if not serializer.is_valid():
        raise TraceFormatError(serializer.errors)
    validated = serializer.validated_data

    run = RunSpecSerializer.build(validated['run'])
    proposals = {int(p): v for p, v in validated['proposals'].items()}
    trace = Trace(
        run=run, proposals=proposals, horizon=validated['horizon'], rule=validated['decision_rule'],
    )

    previous = {p: init_state(p, proposals[p], run.n) for p in range(run.n)}
    for item in validated['rounds']:
        r = item['round']
        delivered = frozenset(tuple(edge) for edge in item['delivered'])
        if delivered != round_graph(run, r).edges:
            raise TraceFormatError({'rounds': f'round {r} deliveries differ from the run'})
        sent = {
            m['sender']: Message(tag=m['tag'], x=m['x'], graph=previous[m['sender']].graph, sender=m['sender'])
            for m in item['sent']
        }
        states = {s['id']: ProcessStateSerializer.build(s) for s in item['states']}
        trace.rounds.append(RoundRecord(r=r, sent=sent, delivered=delivered, states_after=states))
        previous = states

    trace.decisions = {int(p): DecisionSerializer.build(d) for p, d in validated['decisions'].items()}
    logger.debug(f'Loaded trace of n={run.n} with {trace.last_round} rounds')
    return trace


def write_trace(path, trace: Trace) -> None:
    write_json(path, dump_trace(trace))


def read_trace(path) -> Trace:
    return load_trace(read_json(path))
