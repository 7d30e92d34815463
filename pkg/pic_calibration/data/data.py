"""pic_calibration module: data
Functions:
    is_data: test if the passed argument is a pic_calibration Data object.
Classes:
    Data: the super class of every record container in pic_calibration.
"""


def is_data(obj):
    """
    Test if the passed argument is a pic_calibration Data object.

    Parameters
    ----------
    obj : object
        The input object.

    Returns
    -------
    test result : bool
        The test result of whether obj is a pic_calibration Data object or not.
    """
    return isinstance(obj, Data)


class Data(object):
    """
    The super class used by all objects holding records for analysis in
    pic_calibration. Analysis functions expect datasets passed through arguments
    to be a descendant of this class.

    Data members are values and name. The values member stores the records and
    the name member is an optional label used in reports.
    """

    def __init__(self, v=None, n=None):
        """
        Sets the values and name members.

        Parameters
        ----------
        v : list
            The records.
        n : str
            The name of the Data object.
        """
        self._values = v
        self._name = n

    def is_empty(self):
        """
        Tests if this Data object holds no records.

        Returns
        -------
        test result : bool
        """
        return self._values is None or len(self._values) == 0

    @property
    def values(self):
        return self._values

    @property
    def name(self):
        return self._name

    def __len__(self):
        return 0 if self._values is None else len(self._values)

    def __iter__(self):
        return iter(self._values or ())

    def __getitem__(self, item):
        return self._values[item]
