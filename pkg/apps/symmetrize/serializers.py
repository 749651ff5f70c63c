from rest_framework import serializers

from apps.blaschke.serializers import SymmetricConfigurationSerializer
from apps.core.serializers import ComplexPointSerializer, spf_to_data

from .models import STAGE_NAMES


class PipelineOutputSerializer(serializers.Serializer):
    result = SymmetricConfigurationSerializer()
    tracked_pole = ComplexPointSerializer()
    tracked_residue = serializers.IntegerField()
    source_height = serializers.FloatField()
    source_sup_norm = serializers.FloatField(allow_null=True)
    sigma0_sup_norm = serializers.FloatField(allow_null=True)
    result_sup_norm = serializers.FloatField(allow_null=True)
    norm_factor = serializers.FloatField(allow_null=True)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        if self.context.get('emit_stages'):
            data['stages'] = {
                name: spf_to_data(instance.stages[name]) for name in STAGE_NAMES if name in instance.stages
            }
        return data
