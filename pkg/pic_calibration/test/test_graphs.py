import os
import unittest

import matplotlib
matplotlib.use('Agg')

import numpy as np

from ..analysis import MetricReport, ScheduleConfig, parameter_recovery, run_schedule, walk_report
from ..circuit import Parameters, build_qw_mesh
from ..data import generate_synthetic_dataset, sample_target_params
from ..exc import InvalidArgumentError
from ..graphs import Graph, GraphLossHistory, GraphMetricHistogram, GraphRecovery, GraphWalk
from .base import MeshTestCase, random_params


class TestGraphs(MeshTestCase):

    def assertSaved(self, name):
        self.assertTrue(os.path.isfile(self.path(name)), name)

    def test_100_recovery(self):
        """The recovery figure has one panel per parameter group"""
        spec = build_qw_mesh(4)
        table = parameter_recovery(spec, random_params(spec, self.rng), random_params(spec, self.rng))
        graph = GraphRecovery(table, save_to=self.path('recovery.png'))
        self.assertSaved('recovery.png')
        self.assertEqual(len(graph.figure.axes), 5)
        self.assertRaises(InvalidArgumentError, GraphRecovery, table.iloc[:0])

    def test_101_loss_history(self):
        """The loss figure marks every leg boundary"""
        spec = build_qw_mesh(3)
        train = generate_synthetic_dataset(spec, sample_target_params(spec, self.rng), 10, seed=1)
        result = run_schedule(spec, train, ScheduleConfig(alternation_rounds=1, max_epochs=3))
        graph = GraphLossHistory(result, save_to=self.path('loss.png'))
        self.assertSaved('loss.png')
        self.assertEqual(len(graph.figure.axes[0].lines), 1 + len(result.boundaries))
        empty = run_schedule(spec, train, ScheduleConfig(max_epochs=0))
        self.assertRaises(InvalidArgumentError, GraphLossHistory, empty)

    def test_102_metric_histogram(self):
        """Each metric of a report can be drawn and unknown metrics are refused"""
        report = MetricReport({'l1': self.rng.uniform(0, 0.1, 50), 'infidelity': self.rng.uniform(0, 1e-3, 50)},
                              bins=10)
        for name in report.names:
            GraphMetricHistogram(report, name, save_to=self.path('{}.png'.format(name)))
            self.assertSaved('{}.png'.format(name))
        self.assertRaises(InvalidArgumentError, GraphMetricHistogram, report, 'purity_error')

    def test_103_walk(self):
        """The walk figure draws theory and model bars for every port"""
        spec = build_qw_mesh(4)
        graph = GraphWalk(walk_report(spec, Parameters.ideal(spec)), save_to=self.path('walk.png'))
        self.assertSaved('walk.png')
        self.assertEqual(len(graph.figure.axes[0].patches), 2 * spec.port_count)

    def test_104_colors(self):
        """Colors cycle and lighten past the palette"""
        self.assertEqual(Graph.get_color(0), (0.0, 0.3, 0.7))
        np.testing.assert_allclose(Graph.get_color(6), (0.4, 0.55, 0.75))
        self.assertRaises(NotImplementedError, Graph, np.zeros(2))


if __name__ == '__main__':
    unittest.main()
