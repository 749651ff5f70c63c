from apps.core.management.base import SPFLabCommand
from apps.core.serializers import read_spf
from apps.symmetrize.serializers import PipelineOutputSerializer
from apps.symmetrize.services import run_pipeline


class Command(SPFLabCommand):
    help = 'Reduce an SPF to a four-fold symmetric configuration around one pole'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='SPF JSON file')
        parser.add_argument('--pole-index', type=int, default=0, help='0-based index in (re, im) order')
        parser.add_argument('--emit-stages', action='store_true', help='Include s1, sigma0, sigma, rho and R')

    def handle(self, *args, **options):
        spf = read_spf(options['input'])
        output = run_pipeline(spf, options['pole_index'])
        self.emit_json(PipelineOutputSerializer(output, context={'emit_stages': options['emit_stages']}).data)
