from rest_framework import serializers

from apps.bounds.serializers import BoundReportSerializer
from apps.core.serializers import SPFSerializer
from apps.norms.models import FunctionalKind
from apps.norms.serializers import FunctionalValueSerializer, exponent_label

SCAN_CSV_HEADER = ['n', 'pattern', 'best_value', 'reference_rate', 'ratio', 'seed', 'evals']


class SearchConfigSerializer(serializers.Serializer):
    order_n = serializers.IntegerField()
    multiplicity_pattern = serializers.ListField(child=serializers.IntegerField())
    pattern_name = serializers.CharField(allow_blank=True)
    functional = serializers.ChoiceField(choices=FunctionalKind.choices)
    p = serializers.SerializerMethodField()
    restrict_upper_half = serializers.BooleanField()
    multistarts = serializers.IntegerField()
    eval_budget = serializers.IntegerField()
    seed = serializers.IntegerField()

    def get_p(self, obj):
        return exponent_label(obj.p)


class SearchRecordSerializer(serializers.Serializer):
    best_value = serializers.FloatField()
    best_spf = SPFSerializer()
    best_start = serializers.IntegerField()
    budget_exhausted = serializers.BooleanField()
    wall_evals = serializers.IntegerField()
    config = SearchConfigSerializer()
    history = serializers.SerializerMethodField()

    def get_history(self, obj):
        return [[int(evaluation), float(value)] for evaluation, value in obj.history]


class ScanRowSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    pattern = serializers.CharField()
    best_value = serializers.FloatField()
    reference_rate = serializers.FloatField(allow_null=True)
    ratio = serializers.FloatField(allow_null=True)
    seed = serializers.IntegerField()
    evals = serializers.IntegerField()
    best_spf = SPFSerializer(source='record.best_spf')


class CertificateBundleSerializer(serializers.Serializer):
    clean = serializers.BooleanField()
    anomalies = serializers.ListField(child=serializers.CharField())
    recomputed = FunctionalValueSerializer()
    reports = BoundReportSerializer(many=True)


def scan_csv_row(row):
    return [
        row.n,
        row.pattern,
        repr(row.best_value),
        '' if row.reference_rate is None else repr(row.reference_rate),
        '' if row.ratio is None else repr(row.ratio),
        row.seed,
        row.evals,
    ]
