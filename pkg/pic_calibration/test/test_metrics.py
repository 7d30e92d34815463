import json
import unittest

import numpy as np
import pandas as pd

from ..analysis import DensityMatrix, MetricReport, evaluate, infidelity, l1_distance, parameter_recovery, purity_error
from ..circuit import build_qw_mesh
from ..data import generate_synthetic_dataset, sample_target_params
from ..exc import DimensionMismatchError, InvalidArgumentError, InvalidDensityMatrixError
from .base import MeshTestCase, random_params


class TestDistances(MeshTestCase):

    def test_100_l1(self):
        """Half the L1 norm of the difference"""
        self.assertAlmostEqual(l1_distance([0.6, 0.4], [0.5, 0.5]), 0.1, places=14)
        self.assertEqual(l1_distance([1.0, 0.0], [0.0, 1.0]), 1.0)
        self.assertEqual(l1_distance([0.2, 0.8], [0.2, 0.8]), 0.0)
        self.assertRaises(DimensionMismatchError, l1_distance, [1.0], [0.5, 0.5])

    def test_101_invalid_density_matrices(self):
        """Non-square, non-Hermitian, wrong-trace and negative matrices are rejected"""
        self.assertRaises(InvalidDensityMatrixError, DensityMatrix, np.ones((2, 3)) / 2)
        self.assertRaises(InvalidDensityMatrixError, DensityMatrix, [[0.5, 0.5], [0.0, 0.5]])
        self.assertRaises(InvalidDensityMatrixError, DensityMatrix, np.eye(2))
        self.assertRaises(InvalidDensityMatrixError, DensityMatrix, [[1.5, 0.0], [0.0, -0.5]])
        self.assertRaises(InvalidDensityMatrixError, DensityMatrix.from_state, [0.0, 0.0])

    def test_102_purity(self):
        """Pure states have purity one and the maximally mixed state 1/d"""
        self.assertAlmostEqual(DensityMatrix.from_state([1.0, 1.0j, 0.0]).purity, 1.0, places=14)
        self.assertAlmostEqual(DensityMatrix.maximally_mixed(4).purity, 0.25, places=14)
        self.assertAlmostEqual(purity_error(DensityMatrix.from_state([1.0, 0.0, 0.0, 0.0]),
                                            DensityMatrix.maximally_mixed(4)), 0.75, places=14)

    def test_103_square_root(self):
        """The square root squares back to the matrix"""
        psi = self.rng.normal(size=3) + 1j * self.rng.normal(size=3)
        rho = DensityMatrix(0.5 * DensityMatrix.from_state(psi).matrix + 0.5 * np.eye(3) / 3)
        root = rho.sqrt()
        np.testing.assert_allclose(root @ root, rho.matrix, atol=1e-12)

    def test_104_infidelity(self):
        """Identical states give zero, orthogonal states one and a pure state against the mixed one 1 - 1/sqrt(d)"""
        psi = DensityMatrix.from_state([0.6, 0.8j])
        self.assertLess(infidelity(psi, psi), 1e-7)
        self.assertAlmostEqual(infidelity(DensityMatrix.from_state([1, 0]), DensityMatrix.from_state([0, 1])), 1.0,
                               places=7)
        self.assertAlmostEqual(infidelity(DensityMatrix.from_state([1, 0, 0, 0]), DensityMatrix.maximally_mixed(4)),
                               0.5, places=7)
        self.assertRaises(DimensionMismatchError, infidelity, np.eye(2) / 2, np.eye(3) / 3)

    def test_105_infidelity_symmetric(self):
        """Infidelity does not depend on the argument order"""
        a = DensityMatrix(0.7 * DensityMatrix.from_state([1.0, 1.0]).matrix + 0.3 * np.eye(2) / 2)
        b = DensityMatrix(0.9 * DensityMatrix.from_state([1.0, 0.2j]).matrix + 0.1 * np.eye(2) / 2)
        self.assertAlmostEqual(infidelity(a, b), infidelity(b, a), places=10)


class TestEvaluate(MeshTestCase):

    def setUp(self):
        super(TestEvaluate, self).setUp()
        self.spec = build_qw_mesh(4)
        self.target = sample_target_params(self.spec, self.rng)

    def test_100_exact_parameters(self):
        """The true parameters score zero on every metric"""
        currents = self.rng.uniform(0, 7, (15, self.spec.ps_count))
        report = evaluate(self.spec, self.target, self.target, currents=currents)
        self.assertEqual(report.names, ['l1', 'infidelity', 'purity_error'])
        self.assertEqual(report.count, 15)
        self.assertLess(np.max(report['l1']), 1e-12)
        self.assertLess(np.max(report['infidelity']), 1e-6)
        self.assertLess(np.max(report['purity_error']), 1e-10)
        self.assertEqual(report.threshold_fraction(), 1.0)

    def test_101_dataset_only(self):
        """Scoring against measured data reports only the L1 distance"""
        ds = generate_synthetic_dataset(self.spec, self.target, 10, seed=3)
        report = evaluate(self.spec, self.target, dataset=ds)
        self.assertEqual(report.names, ['l1'])
        self.assertLess(report.results['l1 mean'], 1e-12)
        other = evaluate(self.spec, random_params(self.spec, self.rng), dataset=ds, threshold=1e-9)
        self.assertGreater(other.results['l1 mean'], 1e-3)
        self.assertEqual(other.threshold, 1e-9)
        self.assertEqual(other.threshold_fraction(), 0.0)

    def test_102_needs_targets(self):
        """Without a dataset or target currents there is nothing to score"""
        self.assertRaises(InvalidArgumentError, evaluate, self.spec, self.target)
        self.assertRaises(InvalidArgumentError, evaluate, self.spec, self.target, self.target)
        self.assertRaises(InvalidArgumentError, MetricReport, {'l1': [0.1]}, bins=0)

    def test_103_save(self):
        """The report writes a per-sample CSV and a JSON summary with histograms"""
        currents = self.rng.uniform(0, 7, (12, self.spec.ps_count))
        report = evaluate(self.spec, random_params(self.spec, self.rng), self.target, currents=currents, bins=5)
        report.save(self.path('metrics.csv'), self.path('summary.json'))
        frame = pd.read_csv(self.path('metrics.csv'), index_col='sample')
        self.assertEqual(list(frame.columns), ['l1', 'infidelity', 'purity_error'])
        np.testing.assert_allclose(frame['l1'].values, report['l1'], rtol=1e-12)
        with open(self.path('summary.json')) as handle:
            summary = json.load(handle)
        self.assertEqual(summary['Samples'], 12)
        self.assertEqual(sum(summary['histograms']['l1']['counts']), 12)
        self.assertEqual(len(summary['histograms']['infidelity']['edges']), 6)

    def test_104_report_text(self):
        """The summary prints as a titled block"""
        report = MetricReport({'l1': [0.01, 0.02, 0.1]}, threshold=0.05)
        self.assertIn('Metrics', str(report))
        self.assertAlmostEqual(report.results['l1 < 0.05'], 2.0 / 3.0, places=12)
        self.assertAlmostEqual(report.results['l1 median'], 0.02, places=12)


class TestRecovery(MeshTestCase):

    def test_100_identical(self):
        """Identical and gauge-equivalent parameter sets recover with zero error"""
        spec = build_qw_mesh(4)
        params = random_params(spec, self.rng)
        shifted = params.copy()
        shifted.b = shifted.b + 2 * np.pi
        shifted.eta = shifted.eta * 3.0
        table = parameter_recovery(spec, shifted, params)
        self.assertEqual(list(table.columns), ['group', 'index', 'estimated', 'target', 'error'])
        self.assertEqual(len(table), 2 * spec.ps_count + 2 * spec.bs_count + spec.port_count)
        self.assertEqual(set(table['group']), {'a', 'b', 'reflectivity', 'alpha', 'eta'})
        self.assertLess(np.abs(table['error']).max(), 1e-9)

    def test_101_errors(self):
        """A perturbed a shows up in its own rows"""
        spec = build_qw_mesh(4)
        params = random_params(spec, self.rng)
        perturbed = params.copy()
        perturbed.a = perturbed.a + 0.01
        table = parameter_recovery(spec, perturbed, params)
        np.testing.assert_allclose(table[table['group'] == 'a']['error'].values, 0.01, atol=1e-12)


if __name__ == '__main__':
    unittest.main()
