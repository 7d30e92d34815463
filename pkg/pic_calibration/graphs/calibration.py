"""pic_calibration module: graphs.calibration
Classes:
    GraphRecovery - estimated against target value for every parameter group.
    GraphLossHistory - the training loss per epoch with the schedule's leg boundaries.
    GraphMetricHistogram - the distribution of one per-sample metric.
    GraphWalk - theory and model walk distributions side by side.
"""
import numpy as np
from matplotlib.gridspec import GridSpec
from matplotlib.pyplot import figure, subplot

from ..exc import InvalidArgumentError
from .base import Graph


class GraphRecovery(Graph):
    """
    One panel per parameter group of a parameter_recovery table, plotting each
    component's estimated value against its target with the identity line.
    """

    _xsize = 12
    _ysize = 3
    _labels = ('Target', 'Estimated', 'Parameter recovery')

    def __init__(self, table, **kwargs):
        if table is None or len(table) == 0:
            raise InvalidArgumentError("there are no parameters to graph")
        super(GraphRecovery, self).__init__(table, **kwargs)

    def draw(self):
        groups = list(dict.fromkeys(self._data['group']))
        f = figure(figsize=(self._xsize, self._ysize))
        f.suptitle(self._title, fontsize=14)
        gs = GridSpec(1, len(groups), wspace=0.35)
        for number, group in enumerate(groups):
            rows = self._data[self._data['group'] == group]
            ax = subplot(gs[number])
            ax.scatter(rows['target'], rows['estimated'], s=12, color=self.get_color(number), zorder=2)
            low = min(rows['target'].min(), rows['estimated'].min())
            high = max(rows['target'].max(), rows['estimated'].max())
            ax.plot([low, high], [low, high], 'k--', linewidth=1, zorder=1)
            self.decorate(ax, title=group, ylabel=number == 0)
        self.finish(f)


class GraphLossHistory(Graph):
    """The loss history of a CalibrationResult on a log scale, leg boundaries dashed."""

    _labels = ('Epoch', 'Loss', 'Training loss')

    def __init__(self, result, **kwargs):
        if not result.loss_history:
            raise InvalidArgumentError("the calibration has no loss history")
        super(GraphLossHistory, self).__init__(result, **kwargs)

    def draw(self):
        history = np.asarray(self._data.loss_history)
        f, ax = self.single_axes()
        plot = ax.semilogy if np.all(history > 0) else ax.plot
        plot(np.arange(len(history)), history, color=self.get_color(0))
        for boundary in self._data.boundaries:
            self.mark(ax, boundary, linewidth=0.8)
        self.decorate(ax)
        self.finish(f)


class GraphMetricHistogram(Graph):
    """
    A histogram of one metric of a MetricReport, titled with its mean and
    standard deviation. The L1 histogram marks the report threshold.
    """

    _labels = (None, 'Samples', None)

    def __init__(self, report, metric='l1', **kwargs):
        if metric not in report.names:
            raise InvalidArgumentError("the report has no '{}' metric".format(metric))
        self._metric = metric
        kwargs.setdefault('xname', metric)
        kwargs.setdefault('title', metric)
        super(GraphMetricHistogram, self).__init__(report, **kwargs)

    def draw(self):
        values = self._data[self._metric]
        counts, edges = self._data.histograms()[self._metric]
        f, ax = self.single_axes()
        ax.bar(edges[:-1], counts, width=np.diff(edges), align='edge', color=self.get_color(0), zorder=2)
        if self._metric == 'l1':
            self.mark(ax, self._data.threshold)
        self.decorate(ax, title=r"{}{}$\mu = {:.4g}$,  $\sigma = {:.4g}$".format(
            self._title, "\n", np.mean(values), np.std(values)))
        self.finish(f)


class GraphWalk(Graph):
    """Bars of the theory and model distributions of a WalkReport per port."""

    _xsize = 9
    _labels = ('Port', 'Probability', 'Walk distribution')

    def draw(self):
        frame = self._data.to_frame()
        x = np.arange(len(frame))
        f, ax = self.single_axes()
        ax.bar(x - 0.2, frame['theory'], width=0.4, color=self.get_color(0), label='theory', zorder=2)
        ax.bar(x + 0.2, frame['model'], width=0.4, color=self.get_color(1), label='model', zorder=2)
        ax.set_xticks(x)
        ax.set_xticklabels([str(p) for p in frame['port']])
        ax.legend()
        self.decorate(ax, title="{}\nL1 = {:.4g}".format(self._title, self._data.distance))
        self.finish(f)
