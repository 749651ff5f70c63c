from django.conf import settings

from apps.core.serializers import parse_exponent
from apps.norms.models import FunctionalKind
from apps.search.models import MultiplicityPattern, SearchConfig


def add_search_arguments(parser):
    parser.add_argument('--functional', choices=FunctionalKind.values, default=FunctionalKind.GORIN.value)
    parser.add_argument('--p', default='inf', help="Exponent in (1, inf]; 'inf' for the sup-norm")
    parser.add_argument('--pattern', choices=MultiplicityPattern.values, default=MultiplicityPattern.ONES.value)
    parser.add_argument('--upper-half', action='store_true', help='Keep every pole in the upper half-plane')
    parser.add_argument('--multistarts', type=int, default=None)
    parser.add_argument('--budget', type=int, default=None, help='Evaluations per start')
    parser.add_argument('--seed', type=int, default=0)


def config_from_options(n, options) -> SearchConfig:
    return SearchConfig.for_pattern(
        options['pattern'], n,
        functional=options['functional'],
        p=parse_exponent(options['p']),
        restrict_upper_half=options['upper_half'],
        multistarts=options['multistarts'] or settings.SPFLAB_SEARCH_MULTISTARTS,
        eval_budget=options['budget'] or settings.SPFLAB_SEARCH_BUDGET,
        seed=options['seed'],
    )
