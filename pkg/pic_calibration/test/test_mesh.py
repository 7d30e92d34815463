import unittest

import numpy as np

from ..circuit import (CircuitSpec, MeshSection, Unit, build_qw_mesh, load_mesh, masked_ports, mesh_from_text,
                       mesh_to_text, save_mesh, validate_mesh)
from ..exc import DataFileError, InvalidArgumentError, InvalidMeshError
from .base import MeshTestCase


class TestMesh(MeshTestCase):

    def test_100_full_size_counts(self):
        """The 12 step mesh has 78 beam splitters, 66 phase shifters and 24 modes"""
        spec = build_qw_mesh(12)
        self.assertEqual(spec.bs_count, 78)
        self.assertEqual(spec.ps_count, 66)
        self.assertEqual(spec.mode_count, 24)
        self.assertEqual(spec.input_mode, 12)

    def test_101_single_step(self):
        """One step is a single beam splitter on modes (0, 1) without a phase shifter"""
        spec = build_qw_mesh(1)
        self.assertEqual(spec.bs_count, 1)
        self.assertEqual(spec.ps_count, 0)
        self.assertEqual([u.modes for u in spec.layers[0]], [(0, 1)])
        self.assertIsNone(spec.layers[0][0].ps_index)

    def test_102_three_step_pairs(self):
        """Three steps give the light-cone pairs layer by layer"""
        spec = build_qw_mesh(3)
        self.assertEqual([[u.modes for u in layer] for layer in spec.layers],
                         [[(2, 3)], [(1, 2), (3, 4)], [(0, 1), (2, 3), (4, 5)]])
        self.assertEqual((spec.bs_count, spec.ps_count), (6, 3))

    def test_103_counting_formulas(self):
        """bs_count = T(T + 1)/2 and ps_count = bs_count - T for T up to 16, and every mesh validates"""
        for T in range(1, 17):
            spec = build_qw_mesh(T)
            self.assertEqual(spec.bs_count, T * (T + 1) // 2)
            self.assertEqual(spec.ps_count, spec.bs_count - T)
            validate_mesh(spec)

    def test_104_layers_tile_light_cone(self):
        """Layer t covers modes T - t .. T + t - 1 without gaps"""
        T = 7
        spec = build_qw_mesh(T)
        for t, layer in enumerate(spec.layers, start=1):
            covered = sorted(m for u in layer for m in u.modes)
            self.assertEqual(covered, list(range(T - t, T + t)))

    def test_105_invalid_steps(self):
        """Zero, negative and fractional depths are rejected"""
        for steps in (0, -2, 2.5, 'x'):
            self.assertRaises(InvalidArgumentError, build_qw_mesh, steps)

    def test_106_overlapping_units(self):
        """Two units on the same pair in one layer fail validation"""
        spec = CircuitSpec(1, [[Unit(0, 0), Unit(0, 1)]], 0, [True, True])
        with self.assertRaises(InvalidMeshError) as ctx:
            validate_mesh(spec)
        self.assertIn('overlapping units', str(ctx.exception))

    def test_107_count_mismatch(self):
        """A declared phase shifter count other than bs_count - T fails validation"""
        base = build_qw_mesh(3)
        spec = CircuitSpec(3, base.layers, 3, base.port_mask, ps_count=4)
        with self.assertRaises(InvalidMeshError) as ctx:
            validate_mesh(spec)
        self.assertIn('count mismatch', str(ctx.exception))

    def test_108_phase_shifter_in_final_layer(self):
        """A phase shifter after the last layer fails validation"""
        spec = CircuitSpec(1, [[Unit(0, 0, 0)]], 1, [True, True])
        self.assertRaises(InvalidMeshError, validate_mesh, spec)

    def test_109_default_mask(self):
        """The default mask observes modes 2..21 at T = 12"""
        self.assertEqual(masked_ports(build_qw_mesh(12)), list(range(2, 22)))
        self.assertEqual(build_qw_mesh(12).port_count, 20)

    def test_110_full_mask(self):
        """An all-true mask observes every mode"""
        spec = build_qw_mesh(12, port_mask=np.ones(24, dtype=bool))
        self.assertEqual(masked_ports(spec), list(range(24)))
        self.assertEqual(masked_ports(build_qw_mesh(1)), [0, 1])
        self.assertEqual(masked_ports(build_qw_mesh(2)), [0, 1, 2, 3])

    def test_111_text_round_trip(self):
        """The text form rebuilds an equal spec with the same fingerprint"""
        spec = build_qw_mesh(5, input_mode=4)
        text = mesh_to_text(spec)
        rebuilt = mesh_from_text(text)
        self.assertEqual(rebuilt, spec)
        self.assertEqual(rebuilt.fingerprint(), spec.fingerprint())
        self.assertEqual(mesh_to_text(rebuilt), text)

    def test_112_file_round_trip(self):
        """save_mesh and load_mesh are lossless"""
        spec = build_qw_mesh(4)
        save_mesh(spec, self.path('mesh.json'))
        self.assertEqual(load_mesh(self.path('mesh.json')), spec)

    def test_113_fingerprint_tracks_mask(self):
        """Changing the port mask changes the fingerprint"""
        spec = build_qw_mesh(4)
        other = spec.with_port_mask(np.ones(8, dtype=bool))
        self.assertNotEqual(spec.fingerprint(), other.fingerprint())
        self.assertEqual(len(spec.fingerprint()), 64)

    def test_114_bad_mesh_text(self):
        """Text that is not a mesh document raises DataFileError"""
        self.assertRaises(DataFileError, mesh_from_text, 'not json')
        self.assertRaises(DataFileError, mesh_from_text, '{"format": "other"}')
        self.assertRaises(DataFileError, mesh_from_text, '{"format": "pic-mesh", "version": 99}')

    def test_115_sections(self):
        """Depth 9 of the 12 step mesh splits into 45 and 33 beam splitters with 18 reachable modes"""
        spec = build_qw_mesh(12)
        dynamics = MeshSection(spec, 1, 9)
        measurement = MeshSection(spec, 10, 12)
        self.assertEqual(dynamics.bs_count, 45)
        self.assertEqual(measurement.bs_count, 33)
        self.assertEqual(dynamics.reachable_modes(), list(range(3, 21)))
        self.assertEqual(len(measurement.layers), 3)

    def test_116_invalid_section(self):
        """Sections must lie inside the layer range"""
        spec = build_qw_mesh(3)
        self.assertRaises(InvalidArgumentError, MeshSection, spec, 0, 2)
        self.assertRaises(InvalidArgumentError, MeshSection, spec, 2, 4)
        self.assertRaises(InvalidArgumentError, MeshSection, spec, 3, 2)

    def test_117_units_are_immutable(self):
        """Units reject attribute assignment"""
        unit = Unit(0, 0, 0)
        with self.assertRaises(AttributeError):
            unit.top_mode = 3


if __name__ == '__main__':
    unittest.main()
