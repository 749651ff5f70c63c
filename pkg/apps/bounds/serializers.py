import json

import numpy as np
from rest_framework import serializers

CSV_HEADER = ['name', 'n', 'lhs', 'rhs_without_constant', 'ratio', 'pass', 'context']


def plain(value):
    """numpy scalars and arrays to built-in types, recursively."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


class ContextField(serializers.Field):
    def to_representation(self, value):
        return plain(value)


class BoundReportSerializer(serializers.Serializer):
    """Emits name, lhs, rhs_without_constant, ratio, pass, context in that order."""
    name = serializers.CharField()
    lhs = serializers.FloatField()
    rhs_without_constant = serializers.FloatField()
    ratio = serializers.FloatField(allow_null=True)
    passed = serializers.BooleanField()
    context = ContextField()

    def to_representation(self, instance):
        data = super().to_representation(instance)
        return {
            'name': data['name'],
            'lhs': data['lhs'],
            'rhs_without_constant': data['rhs_without_constant'],
            'ratio': data['ratio'],
            'pass': data['passed'],
            'context': data['context'],
        }


class HistoricalBoundSerializer(serializers.Serializer):
    name = serializers.CharField()
    value = serializers.FloatField(allow_null=True)
    constant_dropped = serializers.BooleanField()
    note = serializers.CharField(allow_blank=True)


def report_csv_row(report):
    context = plain(report.context)
    return [
        report.name,
        context.get('n', ''),
        repr(report.lhs),
        repr(report.rhs_without_constant),
        '' if report.ratio is None else repr(report.ratio),
        'true' if report.passed else 'false',
        json.dumps(context, sort_keys=True),
    ]
