import cmath
import json
import math
import tempfile
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from scipy.integrate import quad

from apps.core.exceptions import AsymmetricConfiguration, EvalAtConjugatePole, IndexOutOfRange
from apps.core.services import make_spf
from apps.core.testing import random_spf
from apps.symmetrize.services import run_pipeline

from .serializers import configuration_from_data
from .services import (
    blaschke_eval, configuration_from_spf, configuration_to_spf, decomposition_check, make_configuration,
    minus_one_roots, mu, mu_continuity_check, mu_range, mu_sup_ratio, phase, phase_integral_check,
)


def f3():
    return make_configuration([(1j, 2)])


def quadruple():
    return make_configuration([(1j, 4)])


def pipeline_corpus(count, seed, max_poles=6):
    rng = np.random.default_rng(seed)
    corpus = []
    while len(corpus) < count:
        spf = random_spf(rng, max_poles=max_poles)
        corpus.append(run_pipeline(spf, int(rng.integers(spf.pole_count)), with_norms=False).result)
    return corpus


def random_points(rng, conf, count):
    roots = minus_one_roots(conf)
    reach = max(1.0, roots.roots[-1])
    re = rng.uniform(-2 * reach, 2 * reach, count)
    im = rng.uniform(0.1, 3.0, count) * conf.min_height * rng.choice([-1.0, 1.0], count)
    return roots, [complex(a, b) for a, b in zip(re, im)]


class ConfigurationTest(SimpleTestCase):
    def test_eta2(self):
        conf = make_configuration([(1 + 2j, 1), (-1 + 2j, 1), (3j, 2)])
        self.assertEqual(conf.eta2, 4)
        self.assertEqual(conf.eta, 2)

    def test_lower_pole_rejected(self):
        with self.assertRaises(AsymmetricConfiguration):
            make_configuration([(-1j, 2)])

    def test_missing_mirror_rejected(self):
        with self.assertRaises(AsymmetricConfiguration):
            make_configuration([(1 + 1j, 1)])
        with self.assertRaises(AsymmetricConfiguration):
            make_configuration([(1 + 1j, 1), (-1 + 1j, 2)])

    def test_odd_axis_multiplicity_rejected(self):
        with self.assertRaises(AsymmetricConfiguration):
            make_configuration([(1j, 1)])

    def test_from_spf(self):
        spf = make_spf([(1j, 2), (-1j, 2)])
        self.assertEqual(configuration_from_spf(spf), f3())
        self.assertEqual(configuration_to_spf(f3()), spf)
        with self.assertRaises(AsymmetricConfiguration):
            configuration_from_spf(make_spf([(1j, 2)]))

    def test_from_json(self):
        conf = configuration_from_data({'upper_poles': [{'re': 0.0, 'im': 1.0, 'mult': 2}]})
        self.assertEqual(conf, f3())


class BlaschkeEvalTest(SimpleTestCase):
    def test_f3_values(self):
        self.assertEqual(blaschke_eval(f3(), 0), 1)
        self.assertEqual(blaschke_eval(f3(), 1j), 0)
        self.assertAlmostEqual(abs(blaschke_eval(f3(), 1) + 1), 0.0, places=15)

    def test_conjugate_pole(self):
        with self.assertRaises(EvalAtConjugatePole):
            blaschke_eval(f3(), -1j)

    def test_unimodular_on_axis_and_real_on_imaginary_axis(self):
        rng = np.random.default_rng(1)
        for conf in pipeline_corpus(20, seed=3):
            for x in rng.uniform(-20, 20, 20):
                self.assertAlmostEqual(abs(blaschke_eval(conf, x)), 1.0, delta=1e-12)
            self.assertAlmostEqual(abs(blaschke_eval(conf, 0) - 1), 0.0, delta=1e-12)
            for y in rng.uniform(0.01, 50, 10):
                value = blaschke_eval(conf, 1j * y)
                self.assertLessEqual(abs(value.imag), 1e-12)
                self.assertGreaterEqual(value.real, -1e-12)
                self.assertLess(value.real, 1.0)

    def test_log_product_branch_agrees(self):
        conf = make_configuration([(1 + 0.5j, 9), (-1 + 0.5j, 9), (2j, 18)])
        self.assertGreater(conf.eta2, 32)
        small = make_configuration([(1 + 0.5j, 1), (-1 + 0.5j, 1), (2j, 2)])
        for z in (0.3, 2 + 1j, -4 - 0.2j):
            expected = blaschke_eval(small, z) ** 9
            self.assertAlmostEqual(abs(blaschke_eval(conf, z) - expected) / max(1.0, abs(expected)), 0.0,
                                   delta=1e-11)


class PhaseDensityTest(SimpleTestCase):
    def test_f3_mu(self):
        self.assertEqual(mu(f3(), 0), 2.0)
        self.assertEqual(mu(f3(), 1), 1.0)
        for x in (0.3, 1.7, 12.0):
            self.assertEqual(mu(f3(), x), mu(f3(), -x))

    def test_f3_phase(self):
        self.assertAlmostEqual(phase(f3(), 1), math.pi, places=14)
        self.assertEqual(phase(f3(), 0), 0.0)
        for x in (0.3, 1.7, 12.0):
            self.assertAlmostEqual(phase(f3(), x) + phase(f3(), -x), 0.0, places=14)

    def test_phase_matches_quadrature_and_product(self):
        for conf in pipeline_corpus(10, seed=5):
            points = sorted(set(conf.x.tolist()))
            start = phase(conf, -10.0)
            b0 = blaschke_eval(conf, 0)
            for x in np.linspace(-10, 10, 21):
                inside = [p for p in points if -10 < p < x]
                integral, _ = quad(lambda t: 2 * mu(conf, t), -10, x, points=inside or None,
                                   limit=400, epsabs=1e-12, epsrel=1e-12) if x > -10 else (0.0, 0.0)
                self.assertAlmostEqual(phase(conf, x) - start, integral, delta=1e-9)
                self.assertAlmostEqual(abs(cmath.exp(1j * phase(conf, x)) - blaschke_eval(conf, x) / b0), 0.0,
                                       delta=1e-10)

    def test_phase_is_increasing(self):
        for conf in pipeline_corpus(5, seed=8):
            values = [phase(conf, x) for x in np.linspace(-30, 30, 601)]
            self.assertTrue(all(b > a for a, b in zip(values, values[1:])))

    def test_mu_range_f3(self):
        low, high = mu_range(f3(), 1.0)
        self.assertAlmostEqual(low, 1.0, places=12)
        self.assertAlmostEqual(high, 2.0, places=12)
        low, high = mu_range(f3(), 2.0)
        self.assertAlmostEqual(low, 0.4, places=12)
        self.assertAlmostEqual(high, 2.0, places=12)

    def test_mu_range_brackets_midpoint(self):
        rng = np.random.default_rng(9)
        for conf in pipeline_corpus(20, seed=9):
            r = float(rng.uniform(0.1, 20))
            low, high = mu_range(conf, r)
            self.assertLessEqual(low, mu(conf, r / 2) * (1 + 1e-12))
            self.assertGreaterEqual(high, mu(conf, r / 2) * (1 - 1e-12))

    def test_mu_sup_ratio_records(self):
        report = mu_sup_ratio(f3())
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.lhs, 2.0, places=12)
        self.assertEqual(report.context['n'], 4)


class RootTest(SimpleTestCase):
    def test_f3(self):
        roots = minus_one_roots(f3())
        self.assertEqual(len(roots), 2)
        self.assertAlmostEqual(roots.roots[0], -1.0, places=13)
        self.assertAlmostEqual(roots.roots[1], 1.0, places=13)

    def test_quadruple_pole(self):
        roots = minus_one_roots(quadruple())
        expected = [-math.tan(3 * math.pi / 8), -math.tan(math.pi / 8), math.tan(math.pi / 8), math.tan(3 * math.pi / 8)]
        for found, exact in zip(roots.roots, expected):
            self.assertAlmostEqual(found, exact, places=12)
        self.assertEqual(roots.positive_roots, roots.roots[2:])

    def test_count_and_antisymmetry(self):
        for conf in pipeline_corpus(30, seed=13):
            roots = minus_one_roots(conf)
            self.assertEqual(len(roots), conf.eta2)
            self.assertNotIn(0.0, roots.roots)
            self.assertEqual(list(roots.roots), sorted(roots.roots))
            for a, b in zip(roots.roots, reversed(roots.roots)):
                self.assertAlmostEqual(a, -b, delta=1e-12 * max(1.0, abs(a)))
            for t in roots.roots:
                self.assertLessEqual(abs(blaschke_eval(conf, t) + 1), 1e-10)


class DecompositionTest(SimpleTestCase):
    def test_f3_fixture_points(self):
        report = decomposition_check(f3(), [2j, 1 + 1j])
        self.assertTrue(report.passed)
        self.assertLessEqual(report.lhs, 1e-12)

    def test_f3_value_at_2i(self):
        b = blaschke_eval(f3(), 2j)
        self.assertAlmostEqual(abs(b - 1 / 9), 0.0, places=15)
        self.assertAlmostEqual(((1 - b) / (1 + b)).real, 0.8, places=14)

    def test_pipeline_corpus(self):
        rng = np.random.default_rng(100)
        corpus = pipeline_corpus(100, seed=100, max_poles=8)
        for conf in corpus:
            self.assertLessEqual(conf.eta2, 64)
            roots, points = random_points(rng, conf, 50)
            report = decomposition_check(conf, points, roots=roots)
            self.assertTrue(report.passed, msg=str(report))


class PhaseIntegralTest(SimpleTestCase):
    def test_f3(self):
        report = phase_integral_check(f3(), 1)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.lhs, math.pi / 2, places=12)
        self.assertAlmostEqual(report.context['quadrature'], math.pi / 2, places=10)

    def test_quadruple(self):
        report = phase_integral_check(quadruple(), 2)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.lhs, 3 * math.pi / 2, places=12)

    def test_index_out_of_range(self):
        with self.assertRaises(IndexOutOfRange):
            phase_integral_check(f3(), 2)
        with self.assertRaises(IndexOutOfRange):
            phase_integral_check(f3(), 0)

    def test_pipeline_corpus(self):
        for conf in pipeline_corpus(100, seed=101, max_poles=8):
            roots = minus_one_roots(conf)
            for k in range(1, conf.eta + 1):
                self.assertTrue(phase_integral_check(conf, k, roots=roots).passed)


class ContinuityTest(SimpleTestCase):
    def test_zero_distance_pair(self):
        report = mu_continuity_check(f3(), 1.0, [(0.0, 0.0)])
        self.assertTrue(report.passed)
        self.assertEqual(report.lhs, 0.0)

    def test_spike_violates(self):
        conf = make_configuration([(1 + 0.001j, 1), (-1 + 0.001j, 1)])
        report = mu_continuity_check(conf, 1.0, [(0.0, 0.5), (1.0, 1.1)])
        self.assertFalse(report.passed)
        self.assertEqual(report.context['worst_pair'], [1.0, 1.1])
        self.assertEqual(report.context['violations'], 1)


class BlaschkeCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.conf_path = f"{self.tmp.name}/f3.json"
        with open(self.conf_path, 'w') as handle:
            json.dump({'upper_poles': [{'re': 0.0, 'im': 1.0, 'mult': 2}]}, handle)
        self.spf_path = f"{self.tmp.name}/f1.json"
        with open(self.spf_path, 'w') as handle:
            json.dump({'poles': [{'re': 0.0, 'im': 1.0, 'mult': 1}]}, handle)

    def run_command(self, **options):
        out = StringIO()
        call_command('spf_blaschke', stdout=out, **options)
        return json.loads(out.getvalue())

    def test_roots(self):
        payload = self.run_command(input=self.conf_path, check='roots')
        self.assertEqual(len(payload['roots']), 2)
        self.assertAlmostEqual(payload['positive_roots'][0], 1.0, places=12)

    def test_phase_integral(self):
        payload = self.run_command(input=self.conf_path, check='phase-integral')
        self.assertEqual([report['pass'] for report in payload], [True])

    def test_decomposition_after_symmetrization(self):
        payload = self.run_command(input=self.spf_path, check='decomposition', symmetrize_input=True)
        self.assertTrue(payload['pass'])
        self.assertEqual(payload['context']['samples'], 50)
