from apps.core.management.base import SPFLabCommand
from apps.core.models import format_complex
from apps.core.serializers import ComplexPointSerializer, parse_complex, read_spf
from apps.core.services import evaluate, evaluate_derivative


class Command(SPFLabCommand):
    help = "Evaluate an SPF (or its derivative) at a complex point given as 're,im'"

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='SPF JSON file')
        parser.add_argument('--at', required=True, help="Point as 're,im'")
        parser.add_argument('--derivative', action='store_true', help="Evaluate rho' instead of rho")
        parser.add_argument('--json', action='store_true', help='Emit {"re": ..., "im": ...}')

    def handle(self, *args, **options):
        spf = read_spf(options['input'])
        z = parse_complex(options['at'])
        value = evaluate_derivative(spf, z) if options['derivative'] else evaluate(spf, z)
        if options['json']:
            self.emit_json(ComplexPointSerializer(value).data)
        else:
            self.stdout.write(format_complex(value))
