import unittest

import numpy as np

from ..analysis import finite_diff_grad, loss, loss_and_grad, trainable_mask
from ..analysis.grad import as_batch
from ..circuit import Parameters, build_qw_mesh, output_distribution
from ..data import Sample
from ..exc import DimensionMismatchError, InvalidArgumentError
from .base import MeshTestCase, random_params


class TestGrad(MeshTestCase):

    def batch(self, spec, n, params=None):
        """Currents and the distributions of another random chip, so no L1 term sits on a kink."""
        currents = self.rng.uniform(0, 7, (n, spec.ps_count))
        source = random_params(spec, self.rng) if params is None else params
        return currents, output_distribution(spec, source, currents)

    def test_100_two_port_toy(self):
        """Half the L1 distance between (0.5, 0.5) and (0.6, 0.4) is 0.1"""
        spec = build_qw_mesh(1)
        value = loss(spec, Parameters.ideal(spec), (np.zeros((1, 0)), np.array([[0.6, 0.4]])))
        self.assertAlmostEqual(value, 0.1, places=14)

    def test_101_disjoint_support(self):
        """Disjoint predicted and target supports give a loss of one"""
        spec = build_qw_mesh(1)
        params = Parameters.ideal(spec)
        params.theta[:] = 0.0
        value = loss(spec, params, (np.zeros((1, 0)), np.array([[1.0, 0.0]])))
        self.assertAlmostEqual(value, 1.0, places=14)

    def test_102_self_consistent_batch(self):
        """Targets produced by the same parameters give zero loss and zero gradient"""
        spec = build_qw_mesh(5)
        params = random_params(spec, self.rng)
        batch = self.batch(spec, 20, params)
        value, grad = loss_and_grad(spec, params, batch)
        self.assertLess(value, 1e-12)
        self.assertLess(grad.norm(), 1e-8)

    def test_103_sum_reduction(self):
        """The loss sums over samples and the mean reduction divides by their number"""
        spec = build_qw_mesh(3)
        params = random_params(spec, self.rng)
        currents, targets = self.batch(spec, 6)
        total = loss(spec, params, (currents, targets))
        parts = sum(loss(spec, params, (currents[k:k + 1], targets[k:k + 1])) for k in range(6))
        self.assertAlmostEqual(total, parts, places=12)
        self.assertAlmostEqual(loss(spec, params, (currents, targets), reduction='mean'), total / 6, places=12)

    def test_104_finite_differences_l1(self):
        """The exact L1 gradient agrees with central differences on 20 random chips at T = 3 and T = 5"""
        for T in (3, 5):
            spec = build_qw_mesh(T)
            for _ in range(20):
                params = random_params(spec, self.rng)
                batch = self.batch(spec, 4)
                _, grad = loss_and_grad(spec, params, batch)
                oracle = finite_diff_grad(spec, params, batch, step=1e-5)
                np.testing.assert_allclose(grad.values, oracle.values, rtol=1e-4, atol=1e-7)

    def test_105_finite_differences_nll(self):
        """The negative log-likelihood gradient agrees with central differences"""
        spec = build_qw_mesh(4)
        for _ in range(5):
            params = random_params(spec, self.rng)
            batch = self.batch(spec, 5)
            _, grad = loss_and_grad(spec, params, batch, kind='nll')
            oracle = finite_diff_grad(spec, params, batch, step=1e-5, kind='nll')
            np.testing.assert_allclose(grad.values, oracle.values, rtol=1e-4, atol=1e-7)

    def test_106_mask_eta_only(self):
        """With only eta trainable every other partial is exactly zero"""
        spec = build_qw_mesh(4)
        params = random_params(spec, self.rng)
        mask = trainable_mask(params, ['eta'])
        _, grad = loss_and_grad(spec, params, self.batch(spec, 3), mask=mask)
        for group in ('a', 'b', 'theta', 'alpha'):
            self.assertTrue(np.all(grad.group(group) == 0.0))
        self.assertGreater(np.abs(grad.group('eta')).sum(), 0.0)

    def test_107_frozen_shifters(self):
        """Frozen phase shifters drop out of a and b"""
        spec = build_qw_mesh(4)
        params = random_params(spec, self.rng)
        mask = trainable_mask(params, ['a', 'b'], frozen_shifters=[0, 2])
        slices = params.group_slices()
        self.assertFalse(mask[slices['a']][0] or mask[slices['b']][2])
        self.assertTrue(mask[slices['a']][1])
        self.assertFalse(mask[slices['theta']].any())
        self.assertRaises(InvalidArgumentError, trainable_mask, params, ['gamma'])
        self.assertRaises(InvalidArgumentError, trainable_mask, params, ['a'], [spec.ps_count])

    def test_108_eta_gauge_direction(self):
        """The gradient is orthogonal to a uniform scaling of eta"""
        spec = build_qw_mesh(5)
        params = random_params(spec, self.rng)
        _, grad = loss_and_grad(spec, params, self.batch(spec, 8))
        self.assertAlmostEqual(float(np.dot(grad.group('eta'), params.eta)), 0.0, delta=1e-10)

    def test_109_offset_periodicity(self):
        """Loss and gradient are unchanged by b + 2 pi"""
        spec = build_qw_mesh(4)
        params = random_params(spec, self.rng)
        shifted = params.copy()
        shifted.b = shifted.b + 2 * np.pi
        batch = self.batch(spec, 6)
        v1, g1 = loss_and_grad(spec, params, batch)
        v2, g2 = loss_and_grad(spec, shifted, batch)
        self.assertAlmostEqual(v1, v2, places=10)
        np.testing.assert_allclose(g1.values, g2.values, atol=1e-9)

    def test_110_threads_do_not_change_results(self):
        """Chunked evaluation on several threads is bit-identical to one thread"""
        spec = build_qw_mesh(5)
        params = random_params(spec, self.rng)
        batch = self.batch(spec, 23)
        v1, g1 = loss_and_grad(spec, params, batch, chunk_size=4, threads=1)
        v4, g4 = loss_and_grad(spec, params, batch, chunk_size=4, threads=4)
        self.assertEqual(v1, v4)
        np.testing.assert_array_equal(g1.values, g4.values)
        v_all, _ = loss_and_grad(spec, params, batch)
        self.assertAlmostEqual(v1, v_all, places=12)

    def test_111_quadratic_objective(self):
        """Central differences of a quadratic are exact up to rounding"""
        spec = build_qw_mesh(3)
        params = random_params(spec, self.rng)
        grad = finite_diff_grad(spec, params, None, step=1e-3, objective=lambda p: float(np.sum(p.flatten() ** 2)))
        np.testing.assert_allclose(grad.values, 2 * params.flatten(), atol=1e-9)

    def test_112_step_refinement(self):
        """A smaller step brings central differences closer to the exact gradient"""
        spec = build_qw_mesh(3)
        params = random_params(spec, self.rng)
        batch = self.batch(spec, 4)
        _, grad = loss_and_grad(spec, params, batch, kind='nll')
        coarse = finite_diff_grad(spec, params, batch, step=1e-2, kind='nll')
        fine = finite_diff_grad(spec, params, batch, step=1e-3, kind='nll')
        self.assertLess(np.max(np.abs(fine.values - grad.values)), np.max(np.abs(coarse.values - grad.values)))

    def test_113_samples_as_batch(self):
        """Lists of Sample stack into current and target arrays"""
        spec = build_qw_mesh(3)
        currents, targets = self.batch(spec, 3)
        samples = [Sample(c, t, k) for k, (c, t) in enumerate(zip(currents, targets))]
        c, t = as_batch(samples)
        np.testing.assert_array_equal(c, currents)
        np.testing.assert_array_equal(t, targets)
        self.assertRaises(InvalidArgumentError, as_batch, [])
        self.assertRaises(InvalidArgumentError, as_batch, [1, 2])

    def test_114_invalid_options(self):
        """Unknown losses, reductions, chunk sizes and mismatched batches are rejected"""
        spec = build_qw_mesh(3)
        params = random_params(spec, self.rng)
        batch = self.batch(spec, 2)
        self.assertRaises(InvalidArgumentError, loss, spec, params, batch, kind='l2')
        self.assertRaises(InvalidArgumentError, loss, spec, params, batch, reduction='max')
        self.assertRaises(InvalidArgumentError, loss, spec, params, batch, chunk_size=0)
        self.assertRaises(DimensionMismatchError, loss, spec, params, (batch[0][:, :2], batch[1]))
        self.assertRaises(InvalidArgumentError, finite_diff_grad, spec, params, batch, step=0.0)


if __name__ == '__main__':
    unittest.main()
