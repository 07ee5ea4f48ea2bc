"""
Trace and verdict serializers.

Trace file layout:
    {"run": {...RunSpec...}, "proposals": {"0": 3, ...}, "horizon": 10,
     "decision_rule": "round-n", "complete": true,
     "rounds": [{"round": 1,
                 "sent": [{"sender": 0, "tag": "prop", "x": 3}, ...],
                 "delivered": [[0, 0], [0, 1], ...],
                 "states": [{...ProcessState...}, ...]}, ...],
     "decisions": {"0": {"value": 1, "round": 3, "source": "self"}, ...}}

A sent message carries the sender's graph from the end of the previous round,
so only its tag and estimate are written; the graph is restored on load.
decision_rule may be left out of hand-written traces and defaults to round-n.
"""
from rest_framework import serializers

from protocol.serializers import DecisionSerializer, ProcessStateSerializer
from protocol.state import DecisionRule, MessageTag
from rounds.serializers import EdgeField, RunSpecSerializer


class SentMessageSerializer(serializers.Serializer):
    sender = serializers.IntegerField(min_value=0)
    tag = serializers.ChoiceField(choices=MessageTag.choices)
    x = serializers.IntegerField(min_value=0)


class RoundRecordSerializer(serializers.Serializer):
    round = serializers.IntegerField(min_value=1)
    sent = SentMessageSerializer(many=True)
    delivered = serializers.ListField(child=EdgeField())
    states = ProcessStateSerializer(many=True)


class TraceSerializer(serializers.Serializer):
    run = RunSpecSerializer()
    proposals = serializers.DictField(child=serializers.IntegerField(min_value=0))
    horizon = serializers.IntegerField(min_value=1)
    decision_rule = serializers.ChoiceField(choices=DecisionRule.choices, default=DecisionRule.ROUND_N.value)
    complete = serializers.BooleanField()
    rounds = RoundRecordSerializer(many=True)
    decisions = serializers.DictField(child=DecisionSerializer())

    def validate(self, data):
        n = data['run']['n']
        try:
            proposal_ids = {int(p) for p in data['proposals']}
            decision_ids = {int(p) for p in data['decisions']}
        except ValueError:
            raise serializers.ValidationError('process ids must be integers')
        if proposal_ids != set(range(n)):
            raise serializers.ValidationError({'proposals': f'must cover exactly the processes 0..{n - 1}'})
        if not decision_ids <= set(range(n)):
            raise serializers.ValidationError({'decisions': 'unknown process id'})
        for i, record in enumerate(data['rounds'], start=1):
            if record['round'] != i:
                raise serializers.ValidationError({'rounds': f'round {record["round"]} found at position {i}'})
            if sorted(m['sender'] for m in record['sent']) != list(range(n)):
                raise serializers.ValidationError({'rounds': f'round {i} must list one message per process'})
            if sorted(s['id'] for s in record['states']) != list(range(n)):
                raise serializers.ValidationError({'rounds': f'round {i} must list one state per process'})
            for s in record['states']:
                named = set(s['pt']) | set(s['graph']['vertices']) | {s['graph']['owner']}
                if s['n'] != n or max(named) >= n:
                    raise serializers.ValidationError(
                        {'rounds': f'round {i}: state of p{s["id"]} names processes outside 0..{n - 1}'}
                    )
        if data['complete'] != (len(decision_ids) == n):
            raise serializers.ValidationError({'complete': 'disagrees with the decisions'})
        return data


class CounterexampleSerializer(serializers.Serializer):
    check = serializers.CharField()
    process = serializers.IntegerField(allow_null=True)
    round = serializers.IntegerField(allow_null=True)
    detail = serializers.CharField()


class VerdictSerializer(serializers.Serializer):
    suite = serializers.CharField()
    passed = serializers.BooleanField()
    checks = serializers.DictField(child=serializers.BooleanField())
    counterexample = CounterexampleSerializer(allow_null=True)
    facts = serializers.DictField()
