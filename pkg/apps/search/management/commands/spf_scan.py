import json

from django.core.management.base import CommandError

from apps.core.management.base import SPFLabCommand, to_csv
from apps.search.serializers import SCAN_CSV_HEADER, ScanRowSerializer, scan_csv_row
from apps.search.services import scan_orders

from ._options import add_search_arguments, config_from_options


def parse_order_list(text):
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise CommandError(f"--n-list must be comma-separated integers, got {text!r}")


class Command(SPFLabCommand):
    help = 'Search over a list of orders and compare with the reference rate'

    def add_arguments(self, parser):
        parser.add_argument('--n-list', required=True, help='Comma-separated orders, e.g. 4,8,16')
        add_search_arguments(parser)
        parser.add_argument('--csv', default=None, help='Write CSV rows here plus a manifest')

    def handle(self, *args, **options):
        orders = parse_order_list(options['n_list'])
        if not orders:
            raise CommandError('--n-list is empty')
        template = config_from_options(orders[0], options)
        rows = scan_orders(orders, template, pattern=options['pattern'])

        if options['csv']:
            fallback = json.dumps({'n_list': orders, 'pattern': options['pattern'],
                                   'functional': options['functional'], 'p': options['p']}, sort_keys=True)
            self.save(options['csv'], to_csv(SCAN_CSV_HEADER, [scan_csv_row(row) for row in rows]),
                      options, seed=template.seed, fallback=fallback)
        else:
            self.emit_json(ScanRowSerializer(rows, many=True).data)
