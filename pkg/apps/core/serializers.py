import json
import math
from pathlib import Path

from rest_framework import serializers

from .exceptions import UnreadableInput
from .models import SPF
from .services import make_spf


class ComplexPointSerializer(serializers.Serializer):
    """{"re": ..., "im": ...} <-> complex."""
    re = serializers.FloatField(source='real')
    im = serializers.FloatField(source='imag')

    def validate(self, attrs):
        if not (math.isfinite(attrs['real']) and math.isfinite(attrs['imag'])):
            raise serializers.ValidationError("Both coordinates must be finite.")
        return attrs

    def create(self, validated_data):
        return complex(validated_data['real'], validated_data['imag'])


class PoleSerializer(serializers.Serializer):
    re = serializers.FloatField(source='location.real')
    im = serializers.FloatField(source='location.imag')
    mult = serializers.IntegerField(source='multiplicity', min_value=1)

    def validate_re(self, value):
        if not math.isfinite(value):
            raise serializers.ValidationError("Real part must be finite.")
        return value

    def validate_im(self, value):
        if not math.isfinite(value):
            raise serializers.ValidationError("Imaginary part must be finite.")
        return value


class SPFSerializer(serializers.Serializer):
    """
    {"poles": [{"re": <float>, "im": <float>, "mult": <int>}, ...]}

    Emission keeps this field order. save() builds the SPF through make_spf,
    so RealPole/DuplicatePole/EmptyInput surface unchanged.
    """
    poles = PoleSerializer(many=True, allow_empty=True)

    def create(self, validated_data):
        return make_spf(
            (complex(item['location']['real'], item['location']['imag']), item['multiplicity'])
            for item in validated_data['poles']
        )


def load_json(path):
    """Parsed JSON document; unreadable files and malformed JSON raise UnreadableInput."""
    try:
        with open(Path(path), 'r', encoding='utf-8') as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise UnreadableInput(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableInput(f"{path}: {exc.strerror if isinstance(exc, OSError) and exc.strerror else exc}")


def spf_from_data(data) -> SPF:
    serializer = SPFSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def read_spf(path) -> SPF:
    return spf_from_data(load_json(path))


def spf_to_data(spf: SPF) -> dict:
    return json.loads(json.dumps(SPFSerializer(spf).data))


def parse_complex(text: str) -> complex:
    """CLI form "re,im"."""
    try:
        re_part, im_part = (float(part) for part in text.split(','))
    except ValueError:
        raise serializers.ValidationError(f"Expected 're,im', got {text!r}.")
    return complex(re_part, im_part)


def parse_exponent(text) -> float:
    """'inf' or a float; range checks are left to the norm engines."""
    if isinstance(text, (int, float)):
        return float(text)
    if str(text).strip().lower() in ('inf', 'infinity', '∞'):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise serializers.ValidationError(f"Exponent must be a number or 'inf', got {text!r}.")
