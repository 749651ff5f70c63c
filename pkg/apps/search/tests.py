import json
import math
import tempfile
from dataclasses import replace
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase, override_settings, tag

from apps.bounds.models import BoundReport
from apps.bounds.services import theorem1_check
from apps.core.exceptions import BudgetExhausted, DomainError
from apps.core.testing import f2

from .models import SearchConfig, multiplicity_pattern
from .serializers import SCAN_CSV_HEADER, CertificateBundleSerializer, ScanRowSerializer, SearchRecordSerializer
from .services import (
    StartOutcome, canonical_seed, certificate, decode, objective_value, optimize, reduce_starts, scan_orders,
    warm_start_vector,
)


def small_config(n=2, **kwargs):
    options = {'multistarts': 2, 'eval_budget': 300, 'seed': 7}
    options.update(kwargs)
    return SearchConfig.for_pattern('ones', n, **options)


class PatternTest(SimpleTestCase):
    def test_patterns(self):
        self.assertEqual(multiplicity_pattern('ones', 3), (1, 1, 1))
        self.assertEqual(multiplicity_pattern('single-heavy', 5), (3, 1, 1))
        self.assertEqual(multiplicity_pattern('balanced', 10), (3, 3, 2, 2))
        for name in ('ones', 'single-heavy', 'balanced'):
            for n in range(1, 40):
                self.assertEqual(sum(multiplicity_pattern(name, n)), n)

    def test_unknown_pattern(self):
        with self.assertRaises(DomainError):
            multiplicity_pattern('lopsided', 4)

    def test_config_validation(self):
        with self.assertRaises(DomainError):
            SearchConfig(order_n=4, multiplicity_pattern=(1, 2))
        with self.assertRaises(DomainError):
            SearchConfig(order_n=2, multiplicity_pattern=(1, 1), p=1.0)
        with self.assertRaises(DomainError):
            SearchConfig(order_n=2, multiplicity_pattern=(1, 1), functional='chebyshev')


class ParametrizationTest(SimpleTestCase):
    def test_canonical_seed_of_order_two_is_f2(self):
        config = small_config()
        self.assertEqual(decode(canonical_seed(config), config), f2())

    def test_upper_half_seed(self):
        config = small_config(3, restrict_upper_half=True)
        spf = decode(canonical_seed(config), config)
        self.assertTrue(all(pole.im > 0 for pole in spf.poles))
        self.assertEqual(spf.pole_count, 3)

    def test_decode_pins_min_height(self):
        config = small_config(4)
        spf = decode(np.array([0.3, -1.0, 2.0, 0.5, 0.7, -0.4, 1.1, 0.2]), config)
        self.assertAlmostEqual(min(abs(pole.im) for pole in spf.poles), 1.0, places=14)

    def test_gauge_is_harmless(self):
        config = small_config(4)
        rng = np.random.default_rng(2)
        for _ in range(5):
            vector = canonical_seed(config) + rng.normal(0, 0.5, 8)
            scaled = vector.copy()
            scaled[:4] *= 3.7
            scaled[4:] += math.log(3.7)
            base = objective_value(vector, config, None)
            self.assertLessEqual(abs(objective_value(scaled, config, None) - base), 1e-8 * base)

    def test_coincident_poles_are_infinite(self):
        config = small_config(3, restrict_upper_half=True)
        self.assertEqual(objective_value(np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]), config), math.inf)


class ReductionTest(SimpleTestCase):
    def test_order_independent(self):
        outcomes = [
            StartOutcome(index=i, value=v, vector=np.zeros(2), evals=10, exhausted=False)
            for i, v in enumerate([3.0, 1.5, 2.0, 1.5, 4.0])
        ]
        rng = np.random.default_rng(0)
        for _ in range(10):
            shuffled = [outcomes[i] for i in rng.permutation(len(outcomes))]
            self.assertEqual(reduce_starts(shuffled).index, 1)


@override_settings(SPFLAB_THREADS=2)
class OptimizeTest(SimpleTestCase):
    def test_gorin_order_two(self):
        record = optimize(small_config())
        self.assertLessEqual(record.best_value, 1.0 + 1e-6)
        self.assertEqual(record.best_spf.order, 2)

    def test_gelfond_order_two(self):
        record = optimize(small_config(functional='gelfond'))
        self.assertLessEqual(record.best_value, math.sqrt(2) + 1e-6)

    def test_history_running_minimum(self):
        record = optimize(small_config(3))
        values = [value for _, value in record.history]
        self.assertTrue(all(a >= b for a, b in zip(values, values[1:])))
        self.assertGreaterEqual(values[-1], record.best_value * (1 - 1e-6))

    def test_deterministic(self):
        config = small_config(3)
        first = json.dumps(SearchRecordSerializer(optimize(config)).data)
        second = json.dumps(SearchRecordSerializer(optimize(config)).data)
        self.assertEqual(first, second)

    def test_thread_count_does_not_matter(self):
        config = small_config(3, multistarts=3)
        with self.settings(SPFLAB_THREADS=1):
            serial = optimize(config)
        self.assertEqual(optimize(config).best_value, serial.best_value)

    def test_upper_half_regime(self):
        record = optimize(small_config(3, functional='gelfond', restrict_upper_half=True))
        self.assertTrue(all(pole.im > 0 for pole in record.best_spf.poles))

    def test_budget_flag(self):
        record = optimize(small_config(eval_budget=1))
        self.assertTrue(record.budget_exhausted)
        self.assertLessEqual(record.best_value, 1.0 + 1e-9)


@override_settings(SPFLAB_THREADS=2)
class ScanAndCertificateTest(SimpleTestCase):
    def test_scan_rows(self):
        rows = scan_orders([4, 8], small_config(4), pattern='ones')
        self.assertEqual([row.n for row in rows], [4, 8])
        for row in rows:
            self.assertAlmostEqual(row.reference_rate, math.log(math.log(row.n)) / math.log(row.n), places=12)
            self.assertGreater(row.ratio, 0)
            self.assertTrue(all(report.ratio > 0 for report in theorem1_check(row.record.best_spf)))
            self.assertTrue(certificate(row.record).clean)

    def test_gelfond_reference_rates(self):
        upper = scan_orders([4], small_config(4, functional='gelfond', restrict_upper_half=True))[0]
        self.assertAlmostEqual(upper.reference_rate, math.log(4) / 2, places=12)
        general = scan_orders([4], small_config(4, functional='gelfond'))[0]
        self.assertAlmostEqual(general.reference_rate, math.sqrt(math.log(4) / 4), places=12)

    def test_warm_start_pads_previous_winner(self):
        previous = optimize(small_config(4))
        config = small_config(8)
        vector = warm_start_vector(previous, config)
        self.assertEqual(vector.shape, (16,))
        padded = decode(vector, config)
        self.assertEqual(padded.order, 8)
        self.assertAlmostEqual(min(abs(pole.im) for pole in padded.poles), 1.0, places=12)
        self.assertLessEqual(objective_value(vector, config), previous.best_value * (1 + 1e-4))

    def test_warm_start_needs_matching_prefix(self):
        previous = optimize(small_config(4))
        self.assertIsNone(warm_start_vector(previous, small_config(4)))
        self.assertIsNone(warm_start_vector(previous, small_config(8, restrict_upper_half=True)))
        self.assertIsNone(warm_start_vector(previous, SearchConfig.for_pattern('single-heavy', 8)))
        self.assertIsNone(warm_start_vector(previous, small_config(8, functional='gelfond', p=2.0)))

    def test_scan_non_increasing(self):
        rows = scan_orders([4, 8, 16], small_config(4))
        values = [row.best_value for row in rows]
        for before, after in zip(values, values[1:]):
            self.assertLessEqual(after, before * 1.05)

    @tag('slow')
    def test_full_scan(self):
        rows = scan_orders([4, 8, 16, 32, 64], small_config(4, eval_budget=1500))
        values = [row.best_value for row in rows]
        for before, after in zip(values, values[1:]):
            self.assertLessEqual(after, before * 1.05)
        for row in rows:
            bundle = certificate(row.record)
            self.assertTrue(bundle.clean, bundle.anomalies)
            self.assertTrue(all(report.ratio > 0 for report in bundle.reports))

    def test_scan_deterministic(self):
        first = json.dumps(ScanRowSerializer(scan_orders([4, 8], small_config(4)), many=True).data)
        second = json.dumps(ScanRowSerializer(scan_orders([4, 8], small_config(4)), many=True).data)
        self.assertEqual(first, second)

    def test_scan_rejects_order_one(self):
        with self.assertRaises(DomainError):
            scan_orders([1], small_config())

    def test_certificate_on_order_two(self):
        bundle = certificate(optimize(small_config()))
        self.assertTrue(bundle.clean)
        self.assertEqual([report.name for report in bundle.reports], ['theorem2'])
        self.assertGreater(bundle.reports[0].ratio, 0)

    def test_understated_value_is_flagged(self):
        record = optimize(small_config())
        bundle = certificate(replace(record, best_value=record.best_value * 0.01))
        self.assertIn('value_mismatch', bundle.anomalies)

    def test_tiny_ratio_is_flagged(self):
        record = optimize(small_config())
        tiny = BoundReport.build('theorem2', 1e-6, 1.0, passed=True, n=2)
        with mock.patch('apps.search.services.theorem2_check', return_value=tiny):
            bundle = certificate(record)
        self.assertEqual(bundle.anomalies, ['ratio_near_zero'])

    def test_certificate_idempotent(self):
        record = optimize(small_config())
        first = CertificateBundleSerializer(certificate(record)).data
        second = CertificateBundleSerializer(certificate(record)).data
        self.assertEqual(json.dumps(first), json.dumps(second))


@override_settings(SPFLAB_THREADS=2)
class SearchCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_search_to_stdout(self):
        out = StringIO()
        call_command('spf_search', n=2, multistarts=2, budget=200, seed=7, stdout=out)
        data = json.loads(out.getvalue())
        self.assertLessEqual(data['best_value'], 1.0 + 1e-6)
        self.assertEqual(data['config']['p'], 'inf')

    def test_search_to_file(self):
        target = Path(self.tmp.name) / 'record.json'
        call_command('spf_search', n=2, multistarts=2, budget=200, seed=7, certify=True, out=str(target),
                     stdout=StringIO())
        data = json.loads(target.read_text())
        self.assertTrue(data['certificate']['clean'])
        manifest = json.loads((Path(self.tmp.name) / 'record.json.manifest.json').read_text())
        self.assertEqual(manifest['seed'], 7)

    def test_strict_budget(self):
        with self.assertRaises(BudgetExhausted):
            call_command('spf_search', n=2, multistarts=1, budget=1, strict=True, stdout=StringIO())

    def test_scan_csv(self):
        target = Path(self.tmp.name) / 'scan.csv'
        call_command('spf_scan', n_list='4', multistarts=2, budget=200, csv=str(target), stdout=StringIO())
        lines = target.read_text().strip().splitlines()
        self.assertEqual(lines[0], ','.join(SCAN_CSV_HEADER))
        self.assertTrue(lines[1].startswith('4,ones,'))
        self.assertTrue((Path(self.tmp.name) / 'scan.csv.manifest.json').exists())

    def test_scan_csv_reproducible(self):
        paths = [Path(self.tmp.name) / name for name in ('first.csv', 'second.csv')]
        for path in paths:
            call_command('spf_scan', n_list='4,8', multistarts=2, budget=200, seed=3, csv=str(path),
                         stdout=StringIO())
        self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())
