import json
import math
import tempfile
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from apps.blaschke.services import make_configuration, mu_continuity_check
from apps.core.exceptions import IndexOutOfRange
from apps.core.serializers import spf_to_data
from apps.core.services import evaluate, evaluate_derivative, make_spf
from apps.core.testing import f1, f2, random_spf, spfs

from .services import antisymmetrize_imag, lifted_part, run_pipeline, symmetrize_real


def random_pairs(rng, conf, count=1000):
    reach = 4 * (conf.max_abs_real + conf.min_height)
    first = rng.uniform(-reach, reach, count)
    second = first + rng.exponential(conf.min_height, count) * rng.choice([-1.0, 1.0], count)
    return np.column_stack([first, second])


class SymmetrizationTest(SimpleTestCase):
    def test_symmetrize_f1(self):
        self.assertEqual(symmetrize_real(f1()), f2())

    def test_symmetrize_f2_doubles(self):
        self.assertEqual(symmetrize_real(f2()), make_spf([(1j, 2), (-1j, 2)]))

    def test_antisymmetrize_f2(self):
        self.assertEqual(antisymmetrize_imag(f2()), make_spf([(1j, 2), (-1j, 2)]))

    def test_antisymmetrize_off_axis_pair(self):
        sigma0 = antisymmetrize_imag(make_spf([(1 + 1j, 1), (1 - 1j, 1)]))
        self.assertEqual(sigma0.order, 4)
        self.assertEqual({p.location for p in sigma0.poles}, {1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j})

    @given(spfs(), st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False))
    @settings(max_examples=60, deadline=None)
    def test_stage_identities(self, spf, z):
        s1 = symmetrize_real(spf)
        sigma0 = antisymmetrize_imag(s1)
        near = min(abs(z - p.location) for p in sigma0.poles)
        near = min([near] + [abs(z.conjugate() - p.location) for p in s1.poles])
        if near < 0.05:
            return
        expected = evaluate(spf, z) + evaluate(spf, z.conjugate()).conjugate()
        self.assertLessEqual(abs(evaluate(s1, z) - expected), 1e-12 * max(1.0, abs(expected)) * spf.order)
        expected = evaluate(s1, z) - evaluate(s1, -z.conjugate()).conjugate()
        self.assertLessEqual(abs(evaluate(sigma0, z) - expected), 1e-12 * max(1.0, abs(expected)) * spf.order)

    @given(spfs(), st.floats(min_value=-20, max_value=20))
    @settings(max_examples=40, deadline=None)
    def test_symmetrized_is_real_on_axis(self, spf, x):
        self.assertEqual(evaluate(symmetrize_real(spf), x).imag, 0.0)


class PipelineTest(SimpleTestCase):
    def test_f1(self):
        output = run_pipeline(f1(), 0)
        self.assertEqual(output.result, make_configuration([(8j, 2)]))
        self.assertEqual(output.stages['R'], make_spf([(8j, 2), (-8j, 2)]))
        self.assertEqual(output.tracked_pole, 8j)
        self.assertEqual(output.tracked_residue, 2)
        self.assertAlmostEqual(output.norm_factor, 2.0, places=8)
        self.assertLessEqual(output.result_sup_norm, output.sigma0_sup_norm)

    def test_general_target(self):
        spf = make_spf([(3 + 2j, 1), (-1 - 1j, 2)])
        target = [p.location for p in spf.poles].index(3 + 2j)
        output = run_pipeline(spf, target)
        self.assertEqual(output.tracked_pole, 16j)
        self.assertGreaterEqual(output.tracked_residue, 2)
        self.assertEqual(set(output.stages), {'s1', 'sigma0', 'sigma', 'rho', 'R'})

    def test_lower_target_tracked_through_conjugate(self):
        spf = make_spf([(2 - 0.5j, 3), (0.2 + 1j, 1)])
        output = run_pipeline(spf, 1, with_norms=False)
        self.assertEqual(output.tracked_pole, 4j)
        self.assertGreaterEqual(output.tracked_residue, 6)

    def test_bad_index(self):
        with self.assertRaises(IndexOutOfRange):
            run_pipeline(f2(), 2)

    def test_random_outputs_validate(self):
        rng = np.random.default_rng(200)
        for _ in range(200):
            spf = random_spf(rng, max_poles=6, max_multiplicity=3)
            self.assertLessEqual(spf.order, 20)
            index = int(rng.integers(spf.pole_count))
            target = spf.poles[index]
            output = run_pipeline(spf, index, with_norms=False)
            make_configuration(p for p in output.result.upper_poles)
            self.assertEqual(output.tracked_pole, complex(0.0, 8 * abs(target.im)))
            self.assertGreaterEqual(output.tracked_residue, 2 * target.multiplicity)
            self.assertEqual(output.result.eta2, 2 * spf.order)

    def test_norm_growth_and_continuity(self):
        rng = np.random.default_rng(201)
        for _ in range(200):
            spf = random_spf(rng, max_poles=6, max_multiplicity=3)
            index = int(rng.integers(spf.pole_count))
            output = run_pipeline(spf, index)
            self.assertLessEqual(output.sigma0_sup_norm, 4 * output.source_sup_norm + 1e-9)
            self.assertLessEqual(output.norm_factor, 4 + 1e-9)
            self.assertLessEqual(output.result_sup_norm, output.sigma0_sup_norm * (1 + 1e-9))
            report = mu_continuity_check(
                output.result, output.source_height, random_pairs(rng, output.result),
                scale=output.source_sup_norm,
            )
            self.assertTrue(report.passed, msg=str(report))

    def test_lifted_derivative_bound(self):
        rng = np.random.default_rng(202)
        for _ in range(20):
            spf = random_spf(rng, max_poles=5)
            output = run_pipeline(spf, int(rng.integers(spf.pole_count)))
            lifted = lifted_part(output)
            y1 = output.source_height
            for z in rng.uniform(-20, 20, 50) - 1j * rng.exponential(2 * y1, 50):
                bound = output.source_sup_norm / (y1 + abs(z.imag))
                self.assertLessEqual(abs(evaluate_derivative(lifted, z)), bound * (1 + 1e-9))

    def test_unit_norm_input_gives_unit_norm_output(self):
        output = run_pipeline(f2(), 1)
        self.assertAlmostEqual(output.source_sup_norm, 1.0, places=9)
        self.assertLessEqual(output.result_sup_norm, 1.0 + 1e-9)


class SymmetrizeCommandTest(SimpleTestCase):
    def test_emit_stages(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = f"{tmp}/f1.json"
            with open(path, 'w') as handle:
                json.dump(spf_to_data(f1()), handle)
            out = StringIO()
            call_command('spf_symmetrize', input=path, pole_index=0, emit_stages=True, stdout=out)
        payload = json.loads(out.getvalue())
        self.assertEqual(payload['tracked_pole'], {'re': 0.0, 'im': 8.0})
        self.assertEqual(payload['tracked_residue'], 2)
        self.assertEqual(payload['result']['upper_poles'], [{'re': 0.0, 'im': 8.0, 'mult': 2}])
        self.assertEqual(list(payload['stages']), ['s1', 'sigma0', 'sigma', 'rho', 'R'])
        self.assertTrue(math.isclose(payload['norm_factor'], 2.0, rel_tol=1e-8))
