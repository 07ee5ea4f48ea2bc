"""
Trace-file serializers for protocol values.

Approximation graphs are written as sorted vertex lists plus labelled edges
as [from, to, label] triples in lexicographic order. Each serializer has a
build() that turns validated data back into the frozen value type.
"""
from rest_framework import serializers

from .exceptions import MalformedApproxGraph
from .state import ApproxGraph, Decision, DecisionSource, Message, MessageTag, ProcessState


class SortedIdListField(serializers.ListField):
    """Process-id set written as a sorted list."""
    child = serializers.IntegerField(min_value=0)

    def to_representation(self, data):
        return sorted(data)


class LabeledEdgeField(serializers.ListField):
    child = serializers.IntegerField()

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 3)
        kwargs.setdefault('max_length', 3)
        super().__init__(**kwargs)


class ApproxGraphSerializer(serializers.Serializer):
    owner = serializers.IntegerField(min_value=0)
    vertices = SortedIdListField()
    edges = serializers.ListField(child=LabeledEdgeField())

    def to_representation(self, instance):
        return {
            'owner': instance.owner,
            'vertices': instance.sorted_vertices(),
            'edges': [list(edge) for edge in instance.edges],
        }

    def validate(self, data):
        try:
            self.build(data)
        except MalformedApproxGraph as exc:
            raise serializers.ValidationError(exc.reason)
        return data

    @staticmethod
    def build(data) -> ApproxGraph:
        return ApproxGraph(
            owner=data['owner'],
            vertices=frozenset(data['vertices']),
            edges=tuple(tuple(edge) for edge in data['edges']),
        )


class MessageSerializer(serializers.Serializer):
    tag = serializers.ChoiceField(choices=MessageTag.choices)
    x = serializers.IntegerField(min_value=0)
    sender = serializers.IntegerField(min_value=0)
    graph = ApproxGraphSerializer()

    @staticmethod
    def build(data) -> Message:
        return Message(
            tag=data['tag'],
            x=data['x'],
            sender=data['sender'],
            graph=ApproxGraphSerializer.build(data['graph']),
        )


class DecisionSerializer(serializers.Serializer):
    value = serializers.IntegerField(min_value=0)
    round = serializers.IntegerField(min_value=1)
    source = serializers.ChoiceField(choices=DecisionSource.choices)

    @staticmethod
    def build(data) -> Decision:
        return Decision(value=data['value'], round=data['round'], source=data['source'])


class ProcessStateSerializer(serializers.Serializer):
    id = serializers.IntegerField(min_value=0)
    n = serializers.IntegerField(min_value=1)
    pt = SortedIdListField()
    x = serializers.IntegerField(min_value=0)
    graph = ApproxGraphSerializer()
    decided = serializers.BooleanField()
    decision = DecisionSerializer(allow_null=True, required=False)

    def validate(self, data):
        if data['decided'] != (data.get('decision') is not None):
            raise serializers.ValidationError('decided and decision disagree')
        return data

    @staticmethod
    def build(data) -> ProcessState:
        decision = data.get('decision')
        return ProcessState(
            id=data['id'],
            n=data['n'],
            pt=frozenset(data['pt']),
            x=data['x'],
            graph=ApproxGraphSerializer.build(data['graph']),
            decided=data['decided'],
            decision=DecisionSerializer.build(decision) if decision is not None else None,
        )
