import unittest

import numpy as np

from ..analysis import walk_report
from ..circuit import (CoinSpec, Parameters, build_qw_mesh, coin_matrix, coins_from_mesh,
                       hadamard_reference_distribution, hadamard_walk_currents, mesh_equivalence_check,
                       port_positions, walk_distribution, walk_state)
from ..circuit.walk import DOWN, UP
from ..exc import DimensionMismatchError, InvalidArgumentError, UnreachablePhaseError
from .base import MeshTestCase, random_params


class TestWalkModel(MeshTestCase):

    def test_100_coin_unitary(self):
        """Coins are unitary and the Hadamard coin is (1, 1; 1, -1)/sqrt(2)"""
        for _ in range(5):
            c = coin_matrix(*self.rng.uniform(0, 2 * np.pi, 3))
            np.testing.assert_allclose(c @ c.conj().T, np.eye(2), atol=1e-14)
        np.testing.assert_allclose(coin_matrix(np.pi / 4, 0, np.pi), np.array([[1, 1], [1, -1]]) / np.sqrt(2),
                                   atol=1e-15)

    def test_101_norm(self):
        """A lossless walk keeps its norm and a lossy one decays by alpha per step"""
        T = 6
        coins = CoinSpec.uniform(T, theta=0.3, gamma=1.1, beta=-0.4)
        state = walk_state(T, coins)
        self.assertAlmostEqual(np.sum(np.abs(state) ** 2), 1.0, places=13)
        lossy = walk_state(T, CoinSpec.uniform(T, alpha=0.9))
        self.assertAlmostEqual(np.sum(np.abs(lossy) ** 2), 0.9 ** T, places=13)

    def test_102_light_cone_parity(self):
        """After T steps only sites at an odd or even distance matching T hold amplitude"""
        T = 5
        state = walk_state(T, CoinSpec.hadamard(T))
        for x in range(2 * T + 1):
            if (x - T - T) % 2:
                self.assertTrue(np.all(state[x] == 0))

    def test_103_single_step(self):
        """One Hadamard step from |x0, down> splits onto x0 - 1 and x0 + 1"""
        state = walk_state(1, CoinSpec.hadamard(1))
        self.assertAlmostEqual(state[0, DOWN], 1 / np.sqrt(2), places=15)
        self.assertAlmostEqual(state[2, UP], 1 / np.sqrt(2), places=15)
        self.assertEqual(state[1, DOWN], 0)

    def test_104_invalid_walks(self):
        """Bad shapes, negative losses and walkers leaving the grid are rejected"""
        self.assertRaises(DimensionMismatchError, CoinSpec, np.zeros((2, 4)), np.zeros((2, 4)), np.zeros((2, 4)),
                          np.ones((2, 4)))
        self.assertRaises(InvalidArgumentError, CoinSpec.uniform, 2, alpha=-0.1)
        self.assertRaises(InvalidArgumentError, CoinSpec.uniform, 0)
        self.assertRaises(DimensionMismatchError, walk_state, 3, CoinSpec.uniform(2))
        edge = np.zeros((5, 2))
        edge[0, DOWN] = 1.0
        self.assertRaises(InvalidArgumentError, walk_state, 2, CoinSpec.uniform(2, theta=0.0), edge)
        self.assertRaises(DimensionMismatchError, walk_state, 2, CoinSpec.uniform(2), np.zeros((3, 2)))

    def test_105_port_labels(self):
        """Every output mode carries a distinct (position, coin) label"""
        spec = build_qw_mesh(3)
        labels = port_positions(spec)
        self.assertEqual(labels[:2], [(0, DOWN), (2, UP)])
        self.assertEqual(len(set(labels)), spec.mode_count)


class TestMeshEquivalence(MeshTestCase):

    def test_100_zero_currents(self):
        """Mesh and walk agree at zero current for the ideal chip"""
        for T in range(1, 7):
            spec = build_qw_mesh(T)
            self.assertLess(mesh_equivalence_check(T, Parameters.ideal(spec)), 1e-12)

    def test_101_random_chips(self):
        """Mesh and walk agree for 20 random imperfect chips and currents per depth up to six steps"""
        for T in range(1, 7):
            spec = build_qw_mesh(T)
            for _ in range(20):
                params = random_params(spec, self.rng)
                currents = self.rng.uniform(0, 7, spec.ps_count)
                self.assertLess(mesh_equivalence_check(T, params, currents), 1e-12)

    def test_102_coin_shapes(self):
        """The realized coins cover T steps and 2T + 1 sites"""
        spec = build_qw_mesh(4)
        coins = coins_from_mesh(spec, Parameters.ideal(spec), np.zeros(spec.ps_count))
        self.assertEqual(coins.theta.shape, (4, 9))
        self.assertTrue(np.all(coins.beta == 0))
        self.assertAlmostEqual(walk_distribution(spec.with_port_mask(np.ones(8, dtype=bool)), coins).sum(), 1.0,
                               places=14)


class TestHadamardWalk(MeshTestCase):

    def test_100_currents(self):
        """The ideal chip needs sqrt(pi / (2 a)) on the first shifter and nothing elsewhere"""
        spec = build_qw_mesh(5)
        currents = hadamard_walk_currents(spec, Parameters.ideal(spec))
        self.assertAlmostEqual(currents[0], np.sqrt(np.pi / 2 / 0.12), places=12)
        self.assertTrue(np.all(currents[1:] == 0))

    def test_101_reference(self):
        """The reference covers all 2T ports and sums to one"""
        reference = hadamard_reference_distribution(6)
        self.assertEqual(reference.shape, (12,))
        self.assertAlmostEqual(reference.sum(), 1.0, places=13)
        self.assertTrue(np.all(reference >= 0))

    def test_102_ideal_chip_report(self):
        """The ideal chip and a gauge copy of it reproduce the theory exactly"""
        spec = build_qw_mesh(5)
        ideal = Parameters.ideal(spec)
        self.assertEqual(walk_report(spec, ideal).distance, 0.0)
        twin = ideal.copy()
        twin.eta = twin.eta * 2.0
        report = walk_report(spec, twin)
        self.assertLess(report.distance, 1e-12)
        self.assertEqual(len(report.to_frame()), spec.port_count)
        report.save(self.path('walk.csv'))
        with open(self.path('walk.csv')) as handle:
            self.assertEqual(handle.readline().strip(), 'port,theory,model')

    def test_103_imperfect_chip(self):
        """An imperfect chip drifts from theory and out-of-range phases are refused"""
        spec = build_qw_mesh(5)
        params = random_params(spec, self.rng, spread=0.2)
        report = walk_report(spec, params, max_current=20.0)
        self.assertGreater(report.distance, 0.0)
        self.assertEqual(report.steps, 5)
        self.assertRaises(UnreachablePhaseError, walk_report, spec, params, max_current=0.1)
        self.assertRaises(DimensionMismatchError, walk_report, spec, params, np.zeros(3))


if __name__ == '__main__':
    unittest.main()
