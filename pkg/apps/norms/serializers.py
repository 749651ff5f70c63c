from rest_framework import serializers

from .models import FunctionalKind


class NormResultSerializer(serializers.Serializer):
    value = serializers.FloatField()
    witness = serializers.FloatField(allow_null=True)
    certified_error = serializers.FloatField()


class FunctionalValueSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=FunctionalKind.choices)
    p = serializers.SerializerMethodField()
    value = serializers.FloatField()
    norm = serializers.FloatField()
    y = serializers.FloatField()

    def get_p(self, obj):
        return exponent_label(obj.p)


def exponent_label(p):
    """JSON has no infinity; p = inf is written as the string 'inf'."""
    return 'inf' if p == float('inf') else p
