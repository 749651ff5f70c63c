import math

from django.core.management.base import CommandError

from apps.core.management.base import SPFLabCommand
from apps.core.serializers import parse_exponent, read_spf
from apps.norms.serializers import NormResultSerializer
from apps.norms.services import lp_norm_real, sup_norm_real


class Command(SPFLabCommand):
    help = 'Sup or L^p norm of an SPF (or its derivative) on the real axis'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='SPF JSON file')
        parser.add_argument('--kind', choices=['sup', 'lp'], default='sup')
        parser.add_argument('--p', default=None, help="Exponent for --kind lp")
        parser.add_argument('--derivative', action='store_true', help="Norm of rho' instead of rho")

    def handle(self, *args, **options):
        spf = read_spf(options['input'])
        if options['kind'] == 'sup':
            result = sup_norm_real(spf, use_derivative=options['derivative'])
        else:
            if options['p'] is None:
                raise CommandError('--kind lp needs --p')
            p = parse_exponent(options['p'])
            if math.isinf(p):
                result = sup_norm_real(spf, use_derivative=options['derivative'])
            else:
                result = lp_norm_real(spf, p, use_derivative=options['derivative'])
        self.emit_json(NormResultSerializer(result).data)
