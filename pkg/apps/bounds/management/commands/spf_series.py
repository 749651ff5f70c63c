import math

from apps.bounds.services import tanh_series
from apps.core.management.base import SPFLabCommand


class Command(SPFLabCommand):
    help = 'Sum the partial-fraction series of tanh(a)'

    def add_arguments(self, parser):
        parser.add_argument('--a', type=float, required=True)
        parser.add_argument('--tol', type=float, default=1e-10)

    def handle(self, *args, **options):
        a, tol = options['a'], options['tol']
        value = tanh_series(a, tol)
        closed_form = math.tanh(a)
        self.emit_json({
            'a': a,
            'tol': tol,
            'value': value,
            'closed_form': closed_form,
            'abs_error': abs(value - closed_form),
        })
