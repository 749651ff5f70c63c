import json
import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from hypothesis import example, given, settings
from hypothesis import strategies as st

from apps.blaschke.services import make_configuration
from apps.core.exceptions import DomainError
from apps.core.services import make_spf, rescale
from apps.core.serializers import spf_to_data
from apps.core.testing import f1, f2, random_spf
from apps.symmetrize.services import run_pipeline, symmetrize_real

from .models import BoundReport
from .serializers import CSV_HEADER, BoundReportSerializer, report_csv_row
from .services import (
    delta_of_theta, historical_bounds, lemma1_check, lemma2_check, lemma2_minorant, lemma3_check,
    tanh_series, theorem1_check, theorem1_minorant, theorem2_check, theta_complement_of_mu2, theta_of_mu2,
)


class Theorem1Test(SimpleTestCase):
    def test_order_sixteen(self):
        full, simplified = theorem1_minorant(16, 1)
        log_n = math.log(16)
        self.assertAlmostEqual(full, (log_n + 1) / (log_n - 1) * math.log(log_n) / log_n, places=12)
        self.assertAlmostEqual(full, 0.782804, places=6)
        self.assertAlmostEqual(simplified, 2.0 / math.log(16), places=12)
        self.assertAlmostEqual(simplified, 0.72135, places=5)

    def test_heavy_pole_keeps_order(self):
        full, simplified = theorem1_minorant(16, 10)
        self.assertGreater(full, simplified)

    def test_small_order_rejected(self):
        with self.assertRaises(DomainError):
            theorem1_minorant(3, 1)
        with self.assertRaises(DomainError):
            theorem1_minorant(16, 0)

    def test_full_exceeds_simplified_on_grid(self):
        orders = sorted({int(round(n)) for n in np.geomspace(4, 10 ** 6, 50)})
        for n in orders:
            for nk in range(1, 65):
                full, simplified = theorem1_minorant(n, nk)
                self.assertGreater(full, simplified, msg=f"n={n}, nk={nk}")

    def test_padded_f2_has_positive_ratios(self):
        spf = symmetrize_real(f2())
        self.assertEqual(spf.order, 4)
        reports = theorem1_check(spf)
        self.assertEqual(len(reports), 2)
        for report in reports:
            self.assertGreater(report.ratio, 0)
            self.assertTrue(report.passed)

    def test_ratios_rescale_invariant(self):
        spf = make_spf([(0.5 + 1j, 2), (-1 - 0.4j, 1), (2 + 0.7j, 1)])
        base = theorem1_check(spf)
        for c in (0.1, 7.3):
            scaled = theorem1_check(rescale(spf, c))
            for left, right in zip(base, scaled):
                self.assertLessEqual(abs(left.ratio - right.ratio), 1e-8 * left.ratio)

    def test_random_corpus_ratios_positive(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 20:
            spf = random_spf(rng, max_poles=5)
            if spf.order < 4:
                continue
            checked += 1
            self.assertTrue(all(report.ratio > 0 for report in theorem1_check(spf)))


class ThetaDeltaTest(SimpleTestCase):
    def test_delta_values(self):
        self.assertAlmostEqual(delta_of_theta(19 / 21, 1), 2 / 21, places=14)
        self.assertAlmostEqual(delta_of_theta(0.5, 2), 0.2, places=14)
        self.assertAlmostEqual(delta_of_theta(1e-9, 1), 1.0, places=8)

    def test_delta_decreasing(self):
        thetas = np.linspace(0.01, 0.99, 50)
        for n1 in (1, 2, 5):
            values = [delta_of_theta(t, n1) for t in thetas]
            self.assertTrue(all(a > b for a, b in zip(values, values[1:])))
        self.assertGreater(delta_of_theta(0.3, 2), delta_of_theta(0.3, 3))

    def test_delta_domain(self):
        for theta in (0.0, 1.0, -0.2, 1.5):
            with self.assertRaises(DomainError):
                delta_of_theta(theta, 1)

    def test_theta_of_mu2(self):
        theta = theta_of_mu2(10.5, 1)
        self.assertAlmostEqual(theta, 19 / 21, places=14)
        self.assertAlmostEqual(10.5 * delta_of_theta(theta, 1), 1.0, places=12)
        self.assertAlmostEqual(10.5 * delta_of_theta(theta_of_mu2(10.5, 3), 3), 1.0, places=12)

    def test_theta_of_mu2_domain(self):
        with self.assertRaises(DomainError):
            theta_of_mu2(5.0, 1)

    @given(st.floats(min_value=10.001, max_value=1e6), st.integers(min_value=1, max_value=64))
    @example(mu2=67508.0, n1=1)
    @example(mu2=1e6, n1=1)
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, mu2, n1):
        theta = theta_of_mu2(mu2, n1)
        complement = theta_complement_of_mu2(mu2, n1)
        product = mu2 * delta_of_theta(theta, n1, complement=complement)
        self.assertLessEqual(abs(product - 1.0), 1e-12)

    @given(st.floats(min_value=10.001, max_value=1e6), st.integers(min_value=1, max_value=64))
    @settings(max_examples=100, deadline=None)
    def test_round_trip_from_rounded_theta(self, mu2, n1):
        # rounding theta costs a relative error of order eps * n1 / (1 - theta)
        theta = theta_of_mu2(mu2, n1)
        product = mu2 * delta_of_theta(theta, n1)
        self.assertLessEqual(abs(product - 1.0), 1e-14 * n1 / theta_complement_of_mu2(mu2, n1) + 1e-12)

    def test_complement(self):
        self.assertAlmostEqual(theta_complement_of_mu2(10.5, 1), 2 / 21, places=15)
        complement = theta_complement_of_mu2(67508.0, 1)
        self.assertAlmostEqual(complement * (2 * 67508.0), 2.0, places=12)
        self.assertAlmostEqual(delta_of_theta(19 / 21, 1, complement=2 / 21), 2 / 21, places=14)
        with self.assertRaises(DomainError):
            delta_of_theta(0.5, 1, complement=1.5)


class Lemma1Test(SimpleTestCase):
    def test_pipeline_f1(self):
        output = run_pipeline(f1(), 0, with_norms=False)
        report = lemma1_check(output.result, output.tracked_pole.imag, 0.5, 1.0)
        self.assertTrue(report.passed)
        self.assertEqual(report.context['n1'], 2)

    def test_nonpositive_rhs_passes(self):
        conf = make_configuration([(1j, 2)])
        report = lemma1_check(conf, 1.0, 0.9, 1e-3)
        self.assertLessEqual(report.rhs_without_constant, 0)
        self.assertTrue(report.passed)

    def test_missing_axis_pole(self):
        with self.assertRaises(DomainError):
            lemma1_check(make_configuration([(1j, 2)]), 2.0, 0.5, 1.0)

    def test_random_pipeline_corpus(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            spf = random_spf(rng, max_poles=4)
            output = run_pipeline(spf, int(rng.integers(spf.pole_count)), with_norms=False)
            y1 = output.tracked_pole.imag
            r = float(np.exp(rng.uniform(-3, 3))) * y1
            theta = float(rng.uniform(0.05, 0.95))
            report = lemma1_check(output.result, y1, theta, r)
            self.assertTrue(report.passed, msg=str(report.context))


class Lemma2Test(SimpleTestCase):
    def test_minorant_value(self):
        self.assertAlmostEqual(lemma2_minorant(100, 1), 0.0079727, places=6)

    def test_minorant_decreasing(self):
        self.assertGreater(lemma2_minorant(100, 1), lemma2_minorant(200, 1))
        grid = np.geomspace(60, 1e6, 40)
        values = [lemma2_minorant(m, 2) for m in grid]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_small_argument_gives_negative_value(self):
        self.assertLess(lemma2_minorant(10.5, 1), 0)

    def test_minorant_domain(self):
        with self.assertRaises(DomainError):
            lemma2_minorant(5.0, 1)

    def test_low_pole(self):
        report = lemma2_check(make_configuration([(0.05j, 2)]), 0.05)
        self.assertTrue(report.context['applicable'])
        self.assertAlmostEqual(report.context['mu2'], 40.0, places=9)
        self.assertAlmostEqual(report.context['r'], 8.0, places=9)
        self.assertAlmostEqual(report.rhs_without_constant, 0.013238, places=5)
        self.assertTrue(report.passed)

    def test_high_pole_not_applicable(self):
        report = lemma2_check(make_configuration([(1j, 2)]), 1.0)
        self.assertFalse(report.context['applicable'])
        self.assertTrue(report.passed)


class TanhSeriesTest(SimpleTestCase):
    def test_unit_argument(self):
        self.assertAlmostEqual(tanh_series(1.0, 1e-10), 0.7615941560, places=10)

    def test_matches_closed_form(self):
        for a in (1e-6, 0.1, 1.0, 10.0, 30.0):
            closed = (math.exp(2 * a) - 1) / (math.exp(2 * a) + 1)
            self.assertLessEqual(abs(tanh_series(a, 1e-10) - closed), 1e-10, msg=f"a={a}")

    def test_large_argument(self):
        self.assertAlmostEqual(tanh_series(10.0, 1e-12), 1.0 - 4.122307e-9, places=12)

    def test_domain(self):
        with self.assertRaises(DomainError):
            tanh_series(0.0, 1e-10)
        with self.assertRaises(DomainError):
            tanh_series(1.0, 0.0)

    @given(st.floats(min_value=1e-6, max_value=30.0))
    @settings(max_examples=60, deadline=None)
    def test_property(self, a):
        self.assertLessEqual(abs(tanh_series(a, 1e-9) - math.tanh(a)), 1e-9)


class Lemma3Test(SimpleTestCase):
    def test_f2(self):
        report = lemma3_check(f2())
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.context['h'], 0.25)
        self.assertAlmostEqual(report.rhs_without_constant, 5 * math.log(2), places=12)
        # rescaled upper part is 1/(z - i sqrt 2), lifted by i/4
        self.assertAlmostEqual(report.lhs, 1.0 / (math.sqrt(2) + 0.25) ** 2, places=8)
        self.assertAlmostEqual(report.context['normalized_derivative_norm'], 1.0, places=8)

    def test_one_sided(self):
        report = lemma3_check(make_spf([(1j, 2)]))
        self.assertTrue(report.passed)
        self.assertFalse(report.context['degenerate'])

    def test_lower_only_is_degenerate(self):
        report = lemma3_check(make_spf([(-1j, 1), (1 - 2j, 1)]))
        self.assertEqual(report.lhs, 0.0)
        self.assertTrue(report.passed)
        self.assertTrue(report.context['degenerate'])

    def test_order_one_rejected(self):
        with self.assertRaises(DomainError):
            lemma3_check(f1())

    def test_random_corpus(self):
        rng = np.random.default_rng(3)
        checked = 0
        while checked < 200:
            spf = random_spf(rng, max_poles=6, max_multiplicity=8)
            if spf.order < 2 or spf.order > 50:
                continue
            checked += 1
            report = lemma3_check(spf)
            self.assertTrue(report.passed, msg=str(report))


class Theorem2Test(SimpleTestCase):
    def test_f2(self):
        report = theorem2_check(f2())
        self.assertAlmostEqual(report.lhs, math.sqrt(2), places=8)
        self.assertAlmostEqual(report.rhs_without_constant, math.sqrt(math.log(2) / 2), places=12)
        self.assertAlmostEqual(report.ratio, 2.40225, places=4)

    def test_ratio_rescale_invariant(self):
        spf = make_spf([(0.3 + 0.8j, 1), (-1 - 1.5j, 2)])
        base = theorem2_check(spf).ratio
        for c in (0.1, 7.3):
            self.assertLessEqual(abs(theorem2_check(rescale(spf, c)).ratio - base), 1e-8 * base)


class HistoricalBoundsTest(SimpleTestCase):
    def test_values(self):
        small = {bound.name: bound for bound in historical_bounds(2)}
        self.assertAlmostEqual(small['nikolaev'].value, 0.828427, places=6)
        self.assertIsNone(small['reference_rate'].value)

        large = {bound.name: bound for bound in historical_bounds(100)}
        self.assertAlmostEqual(large['gelfond'].value, 1.0 / (17.0 * math.log(100)), places=15)
        self.assertAlmostEqual(large['gelfond'].value, 0.0127734, places=7)
        self.assertIn('n0', large['gelfond'].note)
        self.assertAlmostEqual(large['nikolaev_deriv'].value, 1e-3, places=12)
        self.assertTrue(large['nikolaev_deriv'].constant_dropped)
        self.assertAlmostEqual(large['gelfond_deriv'].value, 2.0 ** -25, places=15)
        self.assertAlmostEqual(large['theorem2_rate'].value, math.sqrt(math.log(100) / 100), places=12)

    def test_domain(self):
        with self.assertRaises(DomainError):
            historical_bounds(1)


class ReportSerializerTest(SimpleTestCase):
    def test_field_order_and_pass_key(self):
        report = BoundReport.build('demo', np.float64(1.5), 3.0, passed=True, n=np.int64(4))
        data = BoundReportSerializer(report).data
        self.assertEqual(list(data.keys()), ['name', 'lhs', 'rhs_without_constant', 'ratio', 'pass', 'context'])
        self.assertEqual(data['ratio'], 0.5)
        self.assertEqual(json.dumps(data['context']), '{"n": 4}')

    def test_csv_row(self):
        report = BoundReport.build('demo', 1.0, 0.0, passed=False, n=7)
        row = report_csv_row(report)
        self.assertEqual(len(row), len(CSV_HEADER))
        self.assertEqual(row[1], 7)
        self.assertEqual(row[4], '')
        self.assertEqual(row[5], 'false')


class CheckCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = f"{self.tmp.name}/f2.json"
        with open(self.path, 'w') as handle:
            json.dump(spf_to_data(f2()), handle)

    def test_lemma3(self):
        out = StringIO()
        call_command('spf_check', input=self.path, which='lemma3', stdout=out)
        reports = json.loads(out.getvalue())
        self.assertEqual(len(reports), 1)
        self.assertEqual(reports[0]['name'], 'lemma3')
        self.assertTrue(reports[0]['pass'])

    def test_all_skips_theorem1_below_order_four(self):
        out = StringIO()
        call_command('spf_check', input=self.path, which='all', stdout=out)
        names = [report['name'] for report in json.loads(out.getvalue())]
        self.assertEqual(names, ['theorem2', 'lemma1', 'lemma2', 'lemma3', 'beta-p'])

    def test_csv(self):
        out = StringIO()
        call_command('spf_check', input=self.path, which='theorem2', csv=True, stdout=out)
        lines = out.getvalue().strip().splitlines()
        self.assertEqual(lines[0], ','.join(CSV_HEADER))
        self.assertTrue(lines[1].startswith('theorem2,2,'))

    def test_historical_to_file_with_manifest(self):
        target = Path(self.tmp.name) / 'historical.json'
        call_command('spf_check', which='historical', n=100, out=str(target), stdout=StringIO())
        rows = json.loads(target.read_text())
        self.assertEqual(rows[0]['name'], 'nikolaev')
        manifest = json.loads((Path(self.tmp.name) / 'historical.json.manifest.json').read_text())
        self.assertEqual(set(manifest), {'command_line', 'input_hash', 'seed', 'tool_version', 'timestamp'})

    def test_output_is_reproducible(self):
        first, second = StringIO(), StringIO()
        call_command('spf_check', input=self.path, which='theorem2', stdout=first)
        call_command('spf_check', input=self.path, which='theorem2', stdout=second)
        self.assertEqual(first.getvalue(), second.getvalue())


class SeriesCommandTest(SimpleTestCase):
    def test_series(self):
        out = StringIO()
        call_command('spf_series', a=1.0, stdout=out)
        data = json.loads(out.getvalue())
        self.assertAlmostEqual(data['value'], 0.7615941560, places=10)
        self.assertLessEqual(data['abs_error'], 1e-10)
