"""Output serializers for predicate reports (subsets sorted, lists not tuples)."""
from rest_framework import serializers


class PredicateReportSerializer(serializers.Serializer):
    n = serializers.IntegerField(read_only=True)
    k = serializers.IntegerField(read_only=True)
    holds = serializers.BooleanField(read_only=True)
    min_k = serializers.SerializerMethodField()
    witness_sources = serializers.SerializerMethodField()
    violating_subset = serializers.SerializerMethodField()

    def get_min_k(self, obj):
        return self.context.get('min_k')

    def get_witness_sources(self, obj):
        if obj.witness_sources is None:
            return None
        return [
            {'subset': list(subset), 'source': source}
            for subset, source in sorted(obj.witness_sources.items())
        ]

    def get_violating_subset(self, obj):
        if obj.violating_subset is None:
            return None
        return list(obj.violating_subset)


class TwoSourceWitnessSerializer(serializers.Serializer):
    subset = serializers.ListField(child=serializers.IntegerField(), read_only=True)
    source = serializers.IntegerField(read_only=True, allow_null=True)
    receivers = serializers.ListField(child=serializers.IntegerField(), read_only=True, allow_null=True)


def represent_cover(cover):
    """two_source_cover output as a sorted list of rows."""
    rows = []
    for subset, witness in sorted(cover.items()):
        rows.append({
            'subset': list(subset),
            'source': witness.source if witness else None,
            'receivers': list(witness.receivers) if witness else None,
        })
    return TwoSourceWitnessSerializer(rows, many=True).data
