"""pic_calibration module: data_operations
Functions:
    is_iterable - checks if a given variable is iterable, but not a string.
    is_number - checks if a given object can be converted to a float.
    to_float_array - converts a sequence to a finite one-dimensional float array.
    parse_index_list - parses a comma separated list of non-negative integers.
    read_number_table - reads a whitespace or comma delimited numeric table from a text file.
"""
import six
import numpy as np
import pandas as pd

from ..exc import DimensionMismatchError, InvalidArgumentError, MalformedRecordError


def is_iterable(obj):
    """
    Checks if a given variable is iterable, but not a string.

    Parameters
    ----------
    obj : Any
        The input argument.

    Returns
    -------
    test result : bool
        The test result of whether variable is iterable or not.

    >>> is_iterable([1, 2, 3])
    True

    >>> is_iterable('1, 2, 3')
    False

    >>> is_iterable(42)
    False
    """
    if isinstance(obj, six.string_types):
        return False
    try:
        obj.__iter__()
        return True
    except (AttributeError, TypeError):
        return False


def is_number(obj):
    """
    Checks if the given object is a number.

    >>> is_number(3)
    True

    >>> is_number('7.0')
    True

    >>> is_number([1, 2, 3])
    False

    >>> is_number(None)
    False
    """
    try:
        float(obj)
        return True
    except (ValueError, TypeError):
        return False


def to_float_array(seq, name='array', length=None):
    """
    Converts seq to a one-dimensional float64 array and checks it.

    Parameters
    ----------
    seq : array-like or number
        The input values. A scalar is broadcast when length is given.
    name : str
        The name used in error messages.
    length : int, optional
        The required length.

    Returns
    -------
    arr : np.ndarray
        A new float64 array.
    """
    if not is_iterable(seq):
        if not is_number(seq):
            raise InvalidArgumentError("{} must be numeric, got {!r}".format(name, seq))
        arr = np.full(1 if length is None else length, float(seq))
    else:
        try:
            arr = np.array(seq, dtype=float).ravel()
        except (TypeError, ValueError):
            raise InvalidArgumentError("{} must contain only numbers".format(name))
    if length is not None and len(arr) != length:
        raise DimensionMismatchError("{} has length {} but {} is required".format(name, len(arr), length))
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("{} contains non-finite values".format(name))
    return arr


def parse_index_list(text):
    """
    Parses a comma separated list of non-negative integers.

    >>> parse_index_list('0, 1, 22,23')
    [0, 1, 22, 23]

    >>> parse_index_list('')
    []
    """
    if text is None or not text.strip():
        return []
    out = []
    for item in text.split(','):
        item = item.strip()
        if not item.isdigit():
            raise InvalidArgumentError("'{}' is not a non-negative integer".format(item))
        out.append(int(item))
    return out


def read_number_table(path):
    """
    Reads a text table of numbers. Blank lines and lines starting with # are
    skipped; values may be separated by commas or whitespace.

    Returns
    -------
    table : np.ndarray
        A two-dimensional float array with one row per data line, shape (0, 0)
        for a file without data.

    Raises
    ------
    MalformedRecordError
        When a row is ragged or holds a value that is not a number. The
        line attribute is the 1-based data row.
    """
    try:
        frame = pd.read_csv(path, sep=r'[\s,]+', header=None, comment='#', engine='python', dtype=str)
    except pd.errors.EmptyDataError:
        return np.zeros((0, 0))
    except pd.errors.ParserError as err:
        raise MalformedRecordError("{}: rows of different lengths: {}".format(path, err))
    frame = frame.dropna(axis=1, how='all')
    numbers = frame.apply(pd.to_numeric, errors='coerce')
    bad = np.flatnonzero(numbers.isna().any(axis=1).values)
    if len(bad):
        row = int(bad[0]) + 1
        raise MalformedRecordError("{}: data row {} is not a full row of numbers".format(path, row), line=row,
                                   last_good_line=row - 1)
    return numbers.values.astype(float)
