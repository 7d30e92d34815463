"""pic_calibration module: graphs.base
Classes:
    Graph - The root class of the report figures.
"""
import logging

from matplotlib.gridspec import GridSpec
from matplotlib.pyplot import close, figure, savefig, show, subplot

logger = logging.getLogger(__name__)

_colors = (
    (0.0, 0.3, 0.7),    # blue
    (1.0, 0.1, 0.1),    # red
    (0.0, 0.7, 0.3),    # green
    (1.0, 0.5, 0.0),    # orange
    (0.5, 0.0, 1.0),    # purple
    (0.0, 0.0, 0.0)     # black
)

# Marker color of schedule boundaries and thresholds.
_MARK = 1


class Graph(object):
    """The root class of the report figures.

    A subclass sets _labels to its default (x label, y label, title) and
    implements draw, which builds the figure and hands it to finish. The figure
    is drawn on construction.

    Parameters
    ----------
    data : object
        The report or table to graph.
    xname, yname, title : str
        Override the default labels.
    save_to : str
        Save the figure to this path and close it instead of showing it.
    """

    _xsize = 7
    _ysize = 5
    _labels = ('x', 'y', '')

    def __init__(self, data, **kwargs):
        xname, yname, title = self._labels
        self._xname = kwargs.get('xname') or xname
        self._yname = kwargs.get('yname') or yname
        self._title = kwargs.get('title') or title
        self._save_to = kwargs.get('save_to')
        self._data = data
        self.figure = None
        self.draw()

    @staticmethod
    def get_color(num):
        """The num-th palette color; past the palette the colors repeat lighter.

        Parameters
        ----------
        num : int
            A non-negative color index.

        Returns
        -------
        color : tuple
        """
        floor = int(num) // len(_colors)
        selected = _colors[int(num) % len(_colors)]
        if floor > 0:
            return tuple(value / (2.0 * floor) + 0.4 for value in selected)
        return selected

    def single_axes(self):
        f = figure(figsize=(self._xsize, self._ysize))
        return f, subplot(GridSpec(1, 1)[0])

    def decorate(self, ax, title=None, ylabel=True):
        """Titles, labels and grids one panel."""
        ax.set_title(self._title if title is None else title)
        ax.set_xlabel(self._xname)
        if ylabel:
            ax.set_ylabel(self._yname)
        ax.xaxis.grid(True, linestyle='-', which='major', color='grey', alpha=0.75)
        ax.yaxis.grid(True, linestyle='-', which='major', color='grey', alpha=0.75)

    def mark(self, ax, x, linewidth=1.0):
        ax.axvline(x, color=self.get_color(_MARK), linestyle='--', linewidth=linewidth)

    def finish(self, f):
        """Saves and closes the figure when save_to is set, shows it otherwise."""
        self.figure = f
        if self._save_to:
            savefig(self._save_to)
            close(f)
            logger.info("wrote %s", self._save_to)
        else:
            show()

    def draw(self):
        raise NotImplementedError
