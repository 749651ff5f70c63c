from apps.core.management.base import SPFLabCommand
from apps.core.serializers import parse_exponent, read_spf
from apps.norms.models import FunctionalKind
from apps.norms.serializers import FunctionalValueSerializer
from apps.norms.services import functional


class Command(SPFLabCommand):
    help = 'Scale-invariant Gorin or Gelfond functional of an SPF'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='SPF JSON file')
        parser.add_argument('--functional', choices=FunctionalKind.values, default=FunctionalKind.GORIN.value)
        parser.add_argument('--p', default='inf', help="Exponent in (1, inf], 'inf' allowed")

    def handle(self, *args, **options):
        spf = read_spf(options['input'])
        value = functional(spf, options['functional'], parse_exponent(options['p']))
        self.emit_json(FunctionalValueSerializer(value).data)
