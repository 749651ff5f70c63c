import json

from django.core.management.base import CommandError

from apps.bounds.serializers import (
    CSV_HEADER, BoundReportSerializer, HistoricalBoundSerializer, report_csv_row,
)
from apps.bounds.services import (
    historical_bounds, lemma1_check, lemma2_check, lemma3_check, theorem1_check, theorem2_check,
)
from apps.core.management.base import SPFLabCommand, to_csv
from apps.core.serializers import parse_exponent, read_spf
from apps.norms.services import beta_p_check
from apps.symmetrize.services import run_pipeline

CHECKS = ['theorem1', 'theorem2', 'lemma1', 'lemma2', 'lemma3', 'beta-p', 'historical', 'all']
HISTORICAL_HEADER = ['name', 'value', 'constant_dropped', 'note']


class Command(SPFLabCommand):
    help = 'Evaluate the lower-bound inequalities on an SPF'

    def add_arguments(self, parser):
        parser.add_argument('--input', default=None, help='SPF JSON file (not needed for historical)')
        parser.add_argument('--which', choices=CHECKS, default='all')
        parser.add_argument('--json', action='store_true', help='JSON output (default)')
        parser.add_argument('--csv', action='store_true', help='CSV output')
        parser.add_argument('--p', default='2', help='Exponent for beta-p')
        parser.add_argument('--n', type=int, default=None, help='Order for historical; defaults to the input order')
        parser.add_argument('--pole-index', type=int, default=0,
                            help='Target pole of the symmetrization feeding lemma1/lemma2')
        parser.add_argument('--theta', type=float, default=0.5, help='theta for lemma1')
        parser.add_argument('--r', type=float, default=1.0, help='r for lemma1')
        parser.add_argument('--out', default=None, help='Write to this file plus a manifest instead of stdout')

    def handle(self, *args, **options):
        which = options['which']
        spf = read_spf(options['input']) if options['input'] else None

        if which == 'historical':
            n = options['n'] or (spf.order if spf is not None else None)
            if n is None:
                raise CommandError('historical needs --n or --input')
            self.deliver(self.render_historical(historical_bounds(n), options), options)
            return

        if spf is None:
            raise CommandError(f'--which {which} needs --input')
        reports = self.run_checks(spf, which, options)
        self.deliver(self.render_reports(reports, options), options)

    def run_checks(self, spf, which, options):
        reports = []
        if which in ('theorem1', 'all') and (which == 'theorem1' or spf.order >= 4):
            reports.extend(theorem1_check(spf))
        if which in ('theorem2', 'all'):
            reports.append(theorem2_check(spf))
        if which in ('lemma1', 'lemma2', 'all'):
            output = run_pipeline(spf, options['pole_index'], with_norms=False)
            y1 = output.tracked_pole.imag
            if which in ('lemma1', 'all'):
                reports.append(lemma1_check(output.result, y1, options['theta'], options['r']))
            if which in ('lemma2', 'all'):
                reports.append(lemma2_check(output.result, y1))
        if which in ('lemma3', 'all'):
            reports.append(lemma3_check(spf))
        if which in ('beta-p', 'all'):
            reports.append(beta_p_check(spf, parse_exponent(options['p'])))
        return reports

    def render_reports(self, reports, options):
        if options['csv']:
            return to_csv(CSV_HEADER, [report_csv_row(report) for report in reports])
        return json.dumps(BoundReportSerializer(reports, many=True).data, indent=2)

    def render_historical(self, bounds, options):
        data = HistoricalBoundSerializer(bounds, many=True).data
        if options['csv']:
            return to_csv(HISTORICAL_HEADER, [[row[key] for key in HISTORICAL_HEADER] for row in data])
        return json.dumps(data, indent=2)

    def deliver(self, text, options):
        if options['out']:
            self.save(options['out'], text, options, input_path=options['input'],
                      fallback=json.dumps({'which': options['which'], 'n': options['n']}, sort_keys=True))
        else:
            self.stdout.write(text, ending='' if text.endswith('\n') else '\n')
