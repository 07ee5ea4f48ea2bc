"""
Scenario / RunSpec file serializers.

File format:
    {"n": 3, "prefix": [[[0, 1], ...], ...], "tail": [[0, 1], ...],
     "proposals": {"0": 7, ...},   # optional
     "k": 2}                       # optional

Self-loops are optional in files and inserted on read; an edge listed twice
in the same round is rejected.
"""
from typing import Any, Dict, Optional, Tuple

from django.conf import settings
from rest_framework import serializers

from common.utils.jsonio import read_json
from .exceptions import ScenarioFormatError
from .graphs import RoundGraph, RunSpec


class EdgeField(serializers.ListField):
    """A [from, to] pair."""
    child = serializers.IntegerField(min_value=0)

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 2)
        kwargs.setdefault('max_length', 2)
        super().__init__(**kwargs)


class RunSpecSerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=1, max_value=getattr(settings, 'KSET_MAX_PROCESSES', 16))
    prefix = serializers.ListField(child=serializers.ListField(child=EdgeField()), required=False, default=list)
    tail = serializers.ListField(child=EdgeField())

    def _validate_round(self, n: int, edges, where: str):
        seen = set()
        for q, p in edges:
            if q >= n or p >= n:
                raise serializers.ValidationError({where: f'edge [{q}, {p}] has an endpoint outside [0, {n})'})
            if (q, p) in seen:
                raise serializers.ValidationError({where: f'duplicate edge [{q}, {p}]'})
            seen.add((q, p))

    def validate(self, data):
        n = data['n']
        for i, edges in enumerate(data.get('prefix', [])):
            self._validate_round(n, edges, f'prefix[{i}]')
        self._validate_round(n, data['tail'], 'tail')
        return data

    def to_run_spec(self) -> RunSpec:
        return self.build(self.validated_data)

    @staticmethod
    def build(data) -> RunSpec:
        """RunSpec from validated data (also used for runs nested in trace files)."""
        n = data['n']
        return RunSpec(
            n=n,
            prefix=tuple(RoundGraph.from_edges(n, edges) for edges in data.get('prefix', [])),
            tail=RoundGraph.from_edges(n, data['tail']),
        )

    @staticmethod
    def represent(run: RunSpec) -> Dict[str, Any]:
        """Canonical dict form; edges sorted, self-loops written out."""
        return {
            'n': run.n,
            'prefix': [[list(e) for e in g.sorted_edges()] for g in run.prefix],
            'tail': [list(e) for e in run.tail.sorted_edges()],
        }


class ScenarioSerializer(RunSpecSerializer):
    proposals = serializers.DictField(child=serializers.IntegerField(min_value=0), required=False)
    k = serializers.IntegerField(min_value=1, required=False)

    def validate(self, data):
        data = super().validate(data)
        proposals = data.get('proposals')
        if proposals is not None:
            n = data['n']
            try:
                keys = {int(key) for key in proposals}
            except ValueError:
                raise serializers.ValidationError({'proposals': 'process ids must be integers'})
            if keys != set(range(n)) or len(proposals) != n:
                raise serializers.ValidationError({'proposals': f'must cover exactly the processes 0..{n - 1}'})
            data['proposals'] = {int(key): value for key, value in proposals.items()}
        return data

    def to_scenario(self) -> Tuple[RunSpec, Optional[Dict[int, int]], Optional[int]]:
        data = self.validated_data
        return self.to_run_spec(), data.get('proposals'), data.get('k')

    @staticmethod
    def represent_scenario(
        run: RunSpec,
        proposals: Optional[Dict[int, int]] = None,
        k: Optional[int] = None,
    ) -> Dict[str, Any]:
        data = RunSpecSerializer.represent(run)
        if proposals is not None:
            data['proposals'] = {str(p): v for p, v in sorted(proposals.items())}
        if k is not None:
            data['k'] = k
        return data


def parse_scenario(data: Any) -> Tuple[RunSpec, Optional[Dict[int, int]], Optional[int]]:
    """
    Validate decoded JSON and build (run, proposals, k).

    Raises:
        ScenarioFormatError: with the serializer's error dict.
    """
    serializer = ScenarioSerializer(data=data)
    if not serializer.is_valid():
        raise ScenarioFormatError(serializer.errors)
    return serializer.to_scenario()


def read_scenario(path) -> Tuple[RunSpec, Optional[Dict[int, int]], Optional[int]]:
    return parse_scenario(read_json(path))
