import json
import math
import tempfile
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from rest_framework.exceptions import ValidationError

from core.cli import dispatch

from .exceptions import (
    DomainError, DuplicatePole, EmptyInput, EvalAtPole, NonpositiveScale, RealPole,
)
from .models import format_complex
from .serializers import parse_complex, parse_exponent, spf_from_data, spf_to_data
from .services import (
    conjugate_closure, evaluate, evaluate_derivative, evaluate_many, make_spf, merge_poles,
    min_abs_imag, min_pole_distance, mirror_closure, rescale, split_half_planes, translate,
    triangle_bound,
)
from .testing import f1, f2, spfs


class MakeSPFTest(SimpleTestCase):
    def test_order_is_sum_of_multiplicities(self):
        spf = make_spf([(1 + 1j, 2), (-3 - 0.5j, 3)])
        self.assertEqual(spf.order, 5)
        self.assertEqual(spf.pole_count, 2)

    def test_poles_sorted_by_real_then_imaginary(self):
        spf = make_spf([(1 + 1j, 1), (0 - 1j, 1), (0 + 1j, 1)])
        self.assertEqual([p.location for p in spf.poles], [-1j, 1j, 1 + 1j])

    def test_empty_input(self):
        with self.assertRaises(EmptyInput):
            make_spf([])

    def test_real_pole(self):
        with self.assertRaises(RealPole):
            make_spf([(2 + 0j, 1)])

    def test_duplicate_pole(self):
        with self.assertRaises(DuplicatePole):
            make_spf([(1j, 1), (1j, 2)])

    def test_nonpositive_multiplicity(self):
        with self.assertRaises(DomainError):
            make_spf([(1j, 0)])

    def test_merge_adds_multiplicities(self):
        spf = merge_poles([(1j, 1), (1j, 2), (-1j, 1)])
        self.assertEqual(spf.order, 4)
        self.assertEqual(spf.poles[1].multiplicity, 3)


class EvaluateTest(SimpleTestCase):
    def test_f2_at_one(self):
        self.assertEqual(evaluate(f2(), 1), 1 + 0j)

    def test_f1_at_zero(self):
        self.assertEqual(evaluate(f1(), 0), 1j)

    def test_derivative_of_f2_at_zero(self):
        self.assertAlmostEqual(evaluate_derivative(f2(), 0).real, 2.0, places=14)

    def test_eval_at_pole(self):
        with self.assertRaises(EvalAtPole):
            evaluate(f2(), 1j)
        with self.assertRaises(EvalAtPole):
            evaluate_derivative(f2(), -1j)

    def test_min_pole_distance(self):
        self.assertAlmostEqual(min_pole_distance(f2(), 0), 1.0)

    def test_evaluate_many_matches_scalar(self):
        spf = make_spf([(0.5 + 1j, 2), (-1 - 0.3j, 1)])
        points = np.linspace(-3, 3, 11)
        vectorised = evaluate_many(spf, points)
        derivative = evaluate_many(spf, points, 1)
        for x, value, slope in zip(points, vectorised, derivative):
            self.assertAlmostEqual(abs(value - evaluate(spf, x)), 0.0, places=12)
            self.assertAlmostEqual(abs(slope - evaluate_derivative(spf, x)), 0.0, places=12)

    def test_format_complex(self):
        self.assertEqual(format_complex(1 + 0j), '1.0+0.0i')
        self.assertEqual(format_complex(complex(0.5, -2)), '0.5-2.0i')

    @given(spfs(), st.floats(min_value=-10, max_value=10))
    @settings(max_examples=60, deadline=None)
    def test_conjugate_closed_sets_are_real_on_axis(self, spf, x):
        self.assertEqual(evaluate(conjugate_closure(spf), x).imag, 0.0)


class TransformTest(SimpleTestCase):
    def test_min_abs_imag(self):
        self.assertEqual(min_abs_imag(make_spf([(1 + 2j, 1), (-3 - 0.5j, 1)])), 0.5)

    def test_rescale_rejects_nonpositive(self):
        for c in (0.0, -1.0, math.inf, math.nan):
            with self.assertRaises(NonpositiveScale):
                rescale(f2(), c)

    @given(spfs(), st.sampled_from([0.1, 0.7, 3.0, 7.3]),
           st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
    @settings(max_examples=80, deadline=None)
    def test_rescale_identity(self, spf, c, z):
        scaled = rescale(spf, c)
        if min_pole_distance(scaled, z) < 0.05 or min_pole_distance(spf, c * z) < 0.05:
            return
        expected = c * evaluate(spf, c * z)
        self.assertLessEqual(abs(evaluate(scaled, z) - expected), 1e-12 * max(1.0, abs(expected)) * spf.order)
        self.assertAlmostEqual(min_abs_imag(scaled), min_abs_imag(spf) / c, places=12)

    @given(spfs(), st.floats(min_value=-5, max_value=5))
    @settings(max_examples=40, deadline=None)
    def test_translate_keeps_order(self, spf, w):
        moved = translate(spf, w)
        self.assertEqual(moved.order, spf.order)
        self.assertEqual(min_abs_imag(moved), min_abs_imag(spf))

    def test_split_half_planes(self):
        upper, lower = split_half_planes(f2())
        self.assertEqual(upper, make_spf([(1j, 1)]))
        self.assertEqual(lower, make_spf([(-1j, 1)]))
        upper, lower = split_half_planes(f1())
        self.assertEqual(upper, f1())
        self.assertIsNone(lower)

    @given(spfs())
    @settings(max_examples=40, deadline=None)
    def test_split_reassembles(self, spf):
        upper, lower = split_half_planes(spf)
        rng = np.random.default_rng(0)
        for x in rng.uniform(-10, 10, 100):
            total = evaluate(spf, x)
            parts = sum(evaluate(side, x) for side in (upper, lower) if side is not None)
            self.assertLessEqual(abs(parts - total), 1e-13 * max(1.0, abs(total)) * spf.order)

    def test_mirror_closure(self):
        spf = mirror_closure(make_spf([(1 + 1j, 1), (1 - 1j, 1)]))
        self.assertEqual(spf.order, 4)
        self.assertEqual({p.location for p in spf.poles}, {1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j})

    def test_triangle_bound(self):
        self.assertEqual(triangle_bound(f2()), 2.0)
        self.assertEqual(triangle_bound(f2(), 1), 2.0)


class SerializerTest(SimpleTestCase):
    def test_round_trip(self):
        spf = make_spf([(0.25 - 3j, 2), (-1.5 + 0.1j, 1)])
        data = spf_to_data(spf)
        self.assertEqual(list(data['poles'][0].keys()), ['re', 'im', 'mult'])
        self.assertEqual(spf_from_data(data), spf)

    def test_rejects_zero_multiplicity(self):
        with self.assertRaises(ValidationError):
            spf_from_data({'poles': [{'re': 0, 'im': 1, 'mult': 0}]})

    def test_empty_pole_list_is_an_empty_input(self):
        with self.assertRaises(EmptyInput):
            spf_from_data({'poles': []})

    def test_parse_complex(self):
        self.assertEqual(parse_complex('1,0'), 1 + 0j)
        self.assertEqual(parse_complex('-0.5,2'), complex(-0.5, 2))
        with self.assertRaises(ValidationError):
            parse_complex('1+2i')

    def test_parse_exponent(self):
        self.assertEqual(parse_exponent('inf'), math.inf)
        self.assertEqual(parse_exponent('2.5'), 2.5)


class EvalCommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = f"{self.tmp.name}/f2.json"
        with open(self.path, 'w') as handle:
            json.dump(spf_to_data(f2()), handle)

    def test_text_output(self):
        out = StringIO()
        call_command('spf_eval', input=self.path, at='1,0', stdout=out)
        self.assertEqual(out.getvalue().strip(), '1.0+0.0i')

    def test_json_output(self):
        out = StringIO()
        call_command('spf_eval', input=self.path, at='1,0', json=True, stdout=out)
        self.assertEqual(json.loads(out.getvalue()), {'re': 1.0, 'im': 0.0})


class DispatchTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = f"{self.tmp.name}/f2.json"
        with open(self.path, 'w') as handle:
            json.dump(spf_to_data(f2()), handle)

    def run_cli(self, *argv):
        out, err = StringIO(), StringIO()
        code = dispatch(list(argv), stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()

    def test_norm(self):
        code, out, _ = self.run_cli('norm', '--input', self.path, '--kind', 'sup')
        self.assertEqual(code, 0)
        self.assertAlmostEqual(json.loads(out)['value'], 1.0, places=9)

    def test_check_lemma3(self):
        code, out, _ = self.run_cli('check', '--input', self.path, '--which', 'lemma3')
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)[0]['pass'])

    def test_eval(self):
        code, out, _ = self.run_cli('eval', '--input', self.path, '--at', '1,0')
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), '1.0+0.0i')

    def test_unknown_subcommand(self):
        code, _, err = self.run_cli('plot')
        self.assertEqual(code, 1)
        self.assertIn('usage: spf-lab', err)
        self.assertEqual(json.loads(err.strip().splitlines()[-1])['error'], 'UnknownSubcommand')

    def test_no_arguments(self):
        code, _, err = self.run_cli()
        self.assertEqual(code, 1)
        self.assertIn('usage: spf-lab', err)

    def test_domain_error_exits_one(self):
        bad = f"{self.tmp.name}/real.json"
        with open(bad, 'w') as handle:
            json.dump({'poles': [{'re': 1.0, 'im': 0.0, 'mult': 1}]}, handle)
        code, _, err = self.run_cli('eval', '--input', bad, '--at', '0,1')
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(err)['error'], 'RealPole')

    def test_malformed_json_exits_one(self):
        bad = f"{self.tmp.name}/bad.json"
        with open(bad, 'w') as handle:
            handle.write('{"poles": [')
        code, out, err = self.run_cli('norm', '--input', bad, '--kind', 'sup')
        self.assertEqual(code, 1)
        self.assertEqual(out, '')
        payload = json.loads(err)
        self.assertEqual(set(payload), {'error', 'detail'})
        self.assertEqual(payload['error'], 'UnreadableInput')
        self.assertIn('bad.json', payload['detail'])

    def test_missing_input_exits_one(self):
        missing = f"{self.tmp.name}/missing.json"
        code, _, err = self.run_cli('norm', '--input', missing, '--kind', 'sup')
        self.assertEqual(code, 1)
        payload = json.loads(err)
        self.assertEqual(payload['error'], 'UnreadableInput')
        self.assertIn('missing.json', payload['detail'])

    def test_eval_at_pole(self):
        code, _, err = self.run_cli('eval', '--input', self.path, '--at', '0,1')
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(err)['error'], 'EvalAtPole')

    def test_validation_error(self):
        code, _, err = self.run_cli('eval', '--input', self.path, '--at', '1+2i')
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(err)['error'], 'ValidationError')

    def test_missing_flag(self):
        code, _, err = self.run_cli('norm')
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(err)['error'], 'CommandError')

    def test_index_out_of_range(self):
        code, _, err = self.run_cli('symmetrize', '--input', self.path, '--pole-index', '5')
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(err)['error'], 'IndexOutOfRange')

    def test_strict_budget_exits_two(self):
        code, _, err = self.run_cli('search', '--n', '2', '--multistarts', '1', '--budget', '1', '--strict')
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(err.strip().splitlines()[-1])['error'], 'BudgetExhausted')

    def test_help(self):
        printed = StringIO()
        with redirect_stdout(printed):
            code, _, _ = self.run_cli('series', '--help')
        self.assertEqual(code, 0)
        self.assertIn('--tol', printed.getvalue())

    def test_manifest_records_invocation(self):
        target = Path(self.tmp.name) / 'historical.csv'
        code, _, _ = self.run_cli('check', '--which', 'historical', '--n', '10', '--csv', '--out', str(target))
        self.assertEqual(code, 0)
        self.assertTrue(target.read_text().startswith('name,value,constant_dropped,note'))
        manifest = json.loads((Path(self.tmp.name) / 'historical.csv.manifest.json').read_text())
        self.assertTrue(manifest['command_line'].startswith('spf-lab check --which historical'))
