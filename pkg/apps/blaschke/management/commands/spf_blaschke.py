import numpy as np

from apps.blaschke.serializers import RootSetSerializer, read_configuration
from apps.blaschke.services import (
    decomposition_check, minus_one_roots, mu_sup_ratio, phase_integral_check,
)
from apps.bounds.serializers import BoundReportSerializer
from apps.core.management.base import SPFLabCommand
from apps.core.serializers import read_spf
from apps.symmetrize.services import run_pipeline


def sample_points(roots, conf, count, seed):
    """Random points off the real axis in both half-planes, spread over the root range."""
    rng = np.random.default_rng(seed)
    reach = max(1.0, max(roots.roots) if roots.roots else 1.0)
    re = rng.uniform(-2.0 * reach, 2.0 * reach, count)
    im = rng.uniform(0.1, 2.0, count) * conf.min_height * rng.choice([-1.0, 1.0], count)
    return [complex(a, b) for a, b in zip(re, im)]


class Command(SPFLabCommand):
    help = 'Checks on the Blaschke product of a symmetric configuration'

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Configuration JSON, or SPF JSON with --symmetrize-input')
        parser.add_argument('--check', choices=['decomposition', 'phase-integral', 'roots', 'mu-sup'],
                            default='roots')
        parser.add_argument('--symmetrize-input', action='store_true',
                            help='Read an SPF and run the symmetrization pipeline first')
        parser.add_argument('--pole-index', type=int, default=0, help='Target pole for --symmetrize-input')
        parser.add_argument('--k', type=int, default=None, help='Single index for phase-integral')
        parser.add_argument('--samples', type=int, default=50, help='Sample points for decomposition')
        parser.add_argument('--seed', type=int, default=0)

    def handle(self, *args, **options):
        if options['symmetrize_input']:
            conf = run_pipeline(read_spf(options['input']), options['pole_index'], with_norms=False).result
        else:
            conf = read_configuration(options['input'])

        check = options['check']
        if check == 'mu-sup':
            self.emit_json(BoundReportSerializer(mu_sup_ratio(conf)).data)
            return

        roots = minus_one_roots(conf)
        if check == 'roots':
            self.emit_json(RootSetSerializer(roots).data)
        elif check == 'decomposition':
            points = sample_points(roots, conf, options['samples'], options['seed'])
            self.emit_json(BoundReportSerializer(decomposition_check(conf, points, roots=roots)).data)
        else:
            indices = [options['k']] if options['k'] is not None else range(1, conf.eta + 1)
            reports = [phase_integral_check(conf, k, roots=roots) for k in indices]
            self.emit_json(BoundReportSerializer(reports, many=True).data)
