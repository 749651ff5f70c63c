import json

from apps.core.exceptions import BudgetExhausted
from apps.core.management.base import SPFLabCommand
from apps.search.serializers import CertificateBundleSerializer, SearchRecordSerializer
from apps.search.services import certificate, optimize

from ._options import add_search_arguments, config_from_options


class Command(SPFLabCommand):
    help = 'Multistart search for a near-extremal SPF of order n'

    def add_arguments(self, parser):
        parser.add_argument('--n', type=int, required=True)
        add_search_arguments(parser)
        parser.add_argument('--certify', action='store_true', help='Attach a certificate to the record')
        parser.add_argument('--strict', action='store_true', help='Fail with exit code 2 if the budget ran out')
        parser.add_argument('--out', default=None, help='Write the record here plus a manifest')

    def handle(self, *args, **options):
        config = config_from_options(options['n'], options)
        record = optimize(config)
        payload = SearchRecordSerializer(record).data
        if options['certify']:
            payload['certificate'] = CertificateBundleSerializer(certificate(record)).data

        text = json.dumps(payload, indent=2)
        if options['out']:
            self.save(options['out'], text + '\n', options, seed=config.seed,
                      fallback=json.dumps(SearchRecordSerializer(record).data['config'], sort_keys=True))
        else:
            self.stdout.write(text)

        if options['strict'] and record.budget_exhausted:
            raise BudgetExhausted(f"Winning start {record.best_start} exhausted {config.eval_budget} evaluations.")
