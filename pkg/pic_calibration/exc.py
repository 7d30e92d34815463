"""pic_calibration module: exc
Classes:
    CalibrationError - root of every error raised by the package.
    ConfigError - invalid arguments, meshes, dimensions or configuration values.
    DataFileError - malformed or mismatched files on disk.
    NumericalError - degenerate or non-finite numbers during a computation.
    DeficientDesignWarning - a tomography design is not informationally complete.
    EpochLimitWarning - a schedule leg stopped at its epoch limit.
"""


class CalibrationError(Exception):
    """Root class of all pic_calibration errors."""
    pass


class ConfigError(CalibrationError, ValueError):
    """Thrown when a configuration value or argument is invalid."""
    pass


class InvalidArgumentError(ConfigError):
    """Thrown when an argument is outside its allowed range."""
    pass


class InvalidMeshError(ConfigError):
    """Thrown when a CircuitSpec violates one of its invariants."""
    pass


class DimensionMismatchError(ConfigError):
    """Thrown when array lengths do not match the circuit they are used with."""
    pass


class InvalidDensityMatrixError(ConfigError):
    """Thrown when a matrix is not Hermitian, not positive or not trace one."""
    pass


class DataFileError(CalibrationError, IOError):
    """Thrown when an artifact on disk cannot be used."""
    pass


class MalformedRecordError(DataFileError):
    """Thrown when a line of a record file cannot be parsed."""

    def __init__(self, message, line=None, last_good_line=None):
        super(MalformedRecordError, self).__init__(message)
        self.line = line
        self.last_good_line = last_good_line


class FingerprintMismatchError(DataFileError):
    """Thrown when a file was produced for a different circuit."""
    pass


class NumericalError(CalibrationError, ArithmeticError):
    """Thrown when a computation produces unusable numbers."""
    pass


class DegenerateDistributionError(NumericalError):
    """Thrown when the total weight on the active ports is zero."""
    pass


class NonFiniteError(NumericalError):
    """Thrown when a loss or gradient is NaN or infinite."""

    def __init__(self, message, phase=None, epoch=None):
        super(NonFiniteError, self).__init__(message)
        self.phase = phase
        self.epoch = epoch


class UnreachablePhaseError(NumericalError):
    """Thrown when a target phase needs a current outside the hardware range."""

    def __init__(self, message, shifters=()):
        super(UnreachablePhaseError, self).__init__(message)
        self.shifters = tuple(shifters)


class DeficientDesignWarning(Warning):
    """Issued when the stacked measurement effects do not span the operator space."""

    def __init__(self, rank, required):
        super(DeficientDesignWarning, self).__init__(rank, required)
        self.rank = rank
        self.required = required

    def __str__(self):
        return "The measurement design has rank {} but {} is needed for informational completeness. " \
               "The reconstruction may not be unique.".format(self.rank, self.required)


class EpochLimitWarning(Warning):
    """Issued when a schedule leg stops at max_epochs before meeting the cut-off."""
    pass
