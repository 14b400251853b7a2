"""Exception types shared across the toolkit."""


class CovplanError(Exception):
    """Base class for toolkit errors."""


class ParameterError(CovplanError, ValueError):
    """A parameter is outside its documented range."""


class BoundsError(CovplanError, IndexError):
    """A coordinate lies outside the grid."""


class EmptyPlanError(CovplanError):
    """Planning was requested on a grid with no usable freespace."""


class DataFormatError(CovplanError, ValueError):
    """A file could not be parsed as one of the documented formats."""
