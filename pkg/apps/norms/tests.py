import json
import math
import tempfile
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from hypothesis import given, settings
from scipy.integrate import simpson

from apps.core.exceptions import UnsupportedExponent
from apps.core.serializers import spf_to_data
from apps.core.services import evaluate, evaluate_derivative, evaluate_many, make_spf, rescale, triangle_bound
from apps.core.testing import f1, f2, random_spf, spfs

from .models import FunctionalKind, conjugate_exponent
from .services import (
    beta_p_check, gelfond_functional, gorin_functional, lp_norm_real, sup_norm_real,
)


def brute_force_lp(spf, p, derivative_order=0, reach=1e8, points=400001):
    """Simpson's rule on a sinh-spaced grid over [-reach, reach] plus the leading-order tail."""
    s = 0.05
    u = np.linspace(-np.arcsinh(reach / s), np.arcsinh(reach / s), points)
    xs = s * np.sinh(u)
    values = np.abs(evaluate_many(spf, xs, derivative_order)) ** p
    body = simpson(values, x=xs)
    c = math.factorial(derivative_order) * spf.order
    exponent = p * (derivative_order + 1) - 1
    tail = 2 * c ** p * reach ** (-exponent) / exponent
    return (body + tail) ** (1 / p)


class SupNormTest(SimpleTestCase):
    def test_f1(self):
        result = sup_norm_real(f1())
        self.assertAlmostEqual(result.value, 1.0, places=9)
        self.assertAlmostEqual(result.witness, 0.0, places=5)

    def test_f2(self):
        result = sup_norm_real(f2())
        self.assertAlmostEqual(result.value, 1.0, places=9)
        self.assertAlmostEqual(abs(result.witness), 1.0, places=5)
        self.assertLessEqual(result.certified_error, 1e-9 * result.value)
        self.assertGreater(result.certified_error, 0.0)

    def test_f2_derivative(self):
        result = sup_norm_real(f2(), use_derivative=True)
        self.assertAlmostEqual(result.value, 2.0, places=9)
        self.assertAlmostEqual(result.witness, 0.0, places=5)

    def test_f1_derivative(self):
        self.assertAlmostEqual(sup_norm_real(f1(), use_derivative=True).value, 1.0, places=9)

    @given(spfs())
    @settings(max_examples=40, deadline=None)
    def test_below_triangle_bound_and_witnessed(self, spf):
        for derivative in (False, True):
            result = sup_norm_real(spf, use_derivative=derivative)
            self.assertLessEqual(result.value, triangle_bound(spf, int(derivative)) * (1 + 1e-12))
            self.assertLessEqual(result.certified_error, 1e-9 * result.value)
            at_witness = evaluate_derivative(spf, result.witness) if derivative else evaluate(spf, result.witness)
            self.assertGreaterEqual(abs(at_witness), result.value - result.certified_error)

    def test_dense_scan_never_exceeds_certified_value(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            spf = random_spf(rng)
            result = sup_norm_real(spf)
            xs = np.linspace(-30, 30, 200001)
            scanned = float(np.max(np.abs(evaluate_many(spf, xs))))
            self.assertLessEqual(scanned, result.value + result.certified_error)


class LpNormTest(SimpleTestCase):
    def test_f1_p2(self):
        self.assertAlmostEqual(lp_norm_real(f1(), 2).value, math.sqrt(math.pi), places=9)

    def test_f2_p2(self):
        result = lp_norm_real(f2(), 2)
        self.assertAlmostEqual(result.value, math.sqrt(2 * math.pi), places=9)
        self.assertIsNone(result.witness)
        self.assertGreater(result.certified_error, 0.0)

    def test_p_at_most_one_is_unsupported(self):
        for p in (1.0, 0.5, -2.0):
            with self.assertRaises(UnsupportedExponent):
                lp_norm_real(f2(), p)

    def test_exponent_close_to_one(self):
        # int (1 + x^2)^(-p/2) dx = sqrt(pi) Gamma((p-1)/2) / Gamma(p/2)
        p = 1.5
        expected = (math.sqrt(math.pi) * math.gamma((p - 1) / 2) / math.gamma(p / 2)) ** (1 / p)
        result = lp_norm_real(f1(), p)
        self.assertAlmostEqual(result.value, expected, places=7)

    def test_slowly_decaying_tail(self):
        # the tail beyond e^300 still holds about 5% of the integral at p = 1.01
        p = 1.01
        expected = (math.sqrt(math.pi) * math.gamma((p - 1) / 2) / math.gamma(p / 2)) ** (1 / p)
        result = lp_norm_real(f1(), p)
        self.assertLessEqual(abs(result.value - expected), result.certified_error + 1e-9 * expected)
        self.assertLessEqual(result.certified_error, 1e-6 * expected)
        self.assertAlmostEqual(result.value / expected, 1.0, places=7)

    def test_agrees_with_brute_force(self):
        rng = np.random.default_rng(2024)
        for index in range(30):
            spf = random_spf(rng, max_poles=4)
            p = (2.0, 3.0, 4.5)[index % 3]
            adaptive = lp_norm_real(spf, p).value
            self.assertAlmostEqual(adaptive / brute_force_lp(spf, p), 1.0, delta=1e-6)

    def test_derivative_agrees_with_brute_force(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            spf = random_spf(rng, max_poles=4)
            adaptive = lp_norm_real(spf, 2.0, use_derivative=True).value
            self.assertAlmostEqual(adaptive / brute_force_lp(spf, 2.0, 1), 1.0, delta=1e-6)


class FunctionalTest(SimpleTestCase):
    def test_conjugate_exponent(self):
        self.assertEqual(conjugate_exponent(math.inf), 1.0)
        self.assertEqual(conjugate_exponent(2.0), 2.0)
        self.assertEqual(conjugate_exponent(3.0), 1.5)

    def test_gorin_fixtures(self):
        self.assertAlmostEqual(gorin_functional(f2(), math.inf).value, 1.0, places=9)
        value = gorin_functional(f1(), 2.0)
        self.assertEqual(value.kind, FunctionalKind.GORIN)
        self.assertAlmostEqual(value.value, math.pi, places=8)

    def test_gelfond_fixtures(self):
        self.assertAlmostEqual(gelfond_functional(f2(), math.inf).value, math.sqrt(2), places=9)
        self.assertAlmostEqual(gelfond_functional(f1(), math.inf).value, 1.0, places=9)

    def test_rescaled_f2(self):
        for c in (0.1, 1.0, 7.3, 250.0):
            scaled = rescale(f2(), c)
            self.assertAlmostEqual(gorin_functional(scaled, math.inf).value, 1.0, places=8)
            self.assertAlmostEqual(gelfond_functional(scaled, math.inf).value, math.sqrt(2), places=8)

    def test_scale_invariance(self):
        rng = np.random.default_rng(50)
        corpus = [random_spf(rng) for _ in range(50)]
        for index, spf in enumerate(corpus):
            p = math.inf if index % 5 else 2.5
            gorin = gorin_functional(spf, p).value
            gelfond = gelfond_functional(spf, p).value
            for c in (0.1, 7.3):
                scaled = rescale(spf, c)
                self.assertAlmostEqual(gorin_functional(scaled, p).value / gorin, 1.0, delta=1e-8)
                self.assertAlmostEqual(gelfond_functional(scaled, p).value / gelfond, 1.0, delta=1e-8)


class BetaPTest(SimpleTestCase):
    def test_f2(self):
        report = beta_p_check(f2(), 2.0)
        self.assertAlmostEqual(report.lhs, 1.0, places=9)
        self.assertAlmostEqual(report.rhs_without_constant, 2 * math.pi, places=8)
        self.assertAlmostEqual(report.context['rhs'], 8 * math.pi, places=7)
        self.assertTrue(report.passed)

    def test_one_sided(self):
        report = beta_p_check(f1(), 2.0)
        self.assertAlmostEqual(report.lhs, 1.0, places=9)
        self.assertEqual(report.context['lower_sup_norm'], 0.0)
        self.assertTrue(report.passed)

    def test_infinite_p_is_unsupported(self):
        with self.assertRaises(UnsupportedExponent):
            beta_p_check(f2(), math.inf)

    @given(spfs(max_poles=4))
    @settings(max_examples=20, deadline=None)
    def test_holds_on_random_spfs(self, spf):
        self.assertTrue(beta_p_check(spf, 3.0).passed)


class NormCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = f"{self.tmp.name}/f2.json"
        with open(self.path, 'w') as handle:
            json.dump(spf_to_data(f2()), handle)

    def run_command(self, name, **options):
        out = StringIO()
        call_command(name, input=self.path, stdout=out, **options)
        return json.loads(out.getvalue())

    def test_sup(self):
        payload = self.run_command('spf_norm', kind='sup')
        self.assertEqual(list(payload), ['value', 'witness', 'certified_error'])
        self.assertAlmostEqual(payload['value'], 1.0, places=9)

    def test_lp(self):
        payload = self.run_command('spf_norm', kind='lp', p='2')
        self.assertAlmostEqual(payload['value'], math.sqrt(2 * math.pi), places=9)
        self.assertIsNone(payload['witness'])

    def test_functional(self):
        payload = self.run_command('spf_functional', functional='gelfond', p='inf')
        self.assertEqual(payload['p'], 'inf')
        self.assertAlmostEqual(payload['value'], math.sqrt(2), places=9)
