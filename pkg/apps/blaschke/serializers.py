from rest_framework import serializers

from apps.core.serializers import PoleSerializer, load_json

from .models import SymmetricConfiguration
from .services import make_configuration


class SymmetricConfigurationSerializer(serializers.Serializer):
    """
    {"upper_poles": [{"re": ..., "im": ..., "mult": ...}, ...]}

    save() validates the four-fold symmetry through make_configuration.
    """
    upper_poles = PoleSerializer(many=True, allow_empty=True)
    eta2 = serializers.IntegerField(read_only=True)

    def create(self, validated_data):
        return make_configuration(
            (complex(item['location']['real'], item['location']['imag']), item['multiplicity'])
            for item in validated_data['upper_poles']
        )


class RootSetSerializer(serializers.Serializer):
    roots = serializers.ListField(child=serializers.FloatField())
    positive_roots = serializers.ListField(child=serializers.FloatField())


def configuration_from_data(data) -> SymmetricConfiguration:
    serializer = SymmetricConfigurationSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def read_configuration(path) -> SymmetricConfiguration:
    return configuration_from_data(load_json(path))
