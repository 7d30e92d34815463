"""Module: base.py
Classes:
    Analysis - Root class of the calibration, metric, walk and tomography reports.
Functions:
    std_output - Renders a titled key = value block or a table for printing.
    to_native - Converts numpy scalars and arrays in a result dict to JSON types.
"""
import logging

import numpy as np

logger = logging.getLogger(__name__)


class Analysis(object):
    """Root class of every report.

    A report wraps the records it summarizes in _data, computes a dict of
    named figures into _results with run, and prints itself when display is set.

    Members:
        _data - the records the report summarizes.
        _display - print the report after it runs.
        _results - the named summary figures, in display order.

    Methods:
        logic - Runs the report, logs the summary and prints it when asked.
        run - Fills _results. Subclasses must override it.
        summary - The results as plain JSON types.
    """

    _name = "Analysis"

    def __init__(self, data, display=True):
        self._data = data
        self._display = display
        self._results = {}

    @property
    def name(self):
        return self._name

    @property
    def data(self):
        return self._data

    @property
    def results(self):
        """The summary figures set by run"""
        return self._results

    def logic(self):
        """Runs the report. Nothing happens without records."""
        if self._data is None:
            return
        self.run()
        logger.debug("%s: %s", self._name, self._results)
        if self._display:
            print(self)

    def run(self):
        raise NotImplementedError

    def summary(self):
        return to_native(self._results)

    def __str__(self):
        return std_output(self._name, self._results, tuple(self._results))


def to_native(value):
    """Recursively turns numpy scalars and arrays into Python numbers and lists."""
    if isinstance(value, dict):
        return {k: to_native(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_native(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def _format(value, precision, width=0):
    if isinstance(value, (bool, np.bool_)):
        text = str(bool(value))
    elif isinstance(value, (int, np.integer)):
        text = str(int(value))
    elif isinstance(value, (float, np.floating)):
        text = '{:.{}g}'.format(float(value), precision)
    else:
        text = str(value)
    return text.ljust(width)


def std_output(name, results, order, precision=4, spacing=14):
    """
    Renders a report for printing.

    Parameters
    ----------
    name : str
        The report title.
    results : dict or list of dict
        A dict renders as aligned key = value lines, a list of dicts as a table.
    order : list or tuple
        The keys to show, in order.
    precision : int
        Significant digits of float values.
    spacing : int
        The column width of tables.

    Returns
    -------
    output_string : str
    """
    lines = ['', '', name, '-' * len(name), '']
    if isinstance(results, list):
        header = ''.join(str(column).ljust(spacing) for column in order)
        lines.extend([header, '-' * len(header)])
        lines.extend(''.join(_format(row[column], precision, spacing) for column in order).rstrip()
                     for row in results)
    elif results:
        width = max(len(str(key)) for key in order)
        lines.extend('{} = {}'.format(str(key).ljust(width), _format(results[key], precision)) for key in order)
    return '\n'.join(lines)
