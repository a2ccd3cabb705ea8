"""Exception types shared across the package.

``ValidationError`` covers bad inputs (files, flags, shapes, parameter
ranges) and maps to CLI exit code 2.  ``NumericalContractError`` covers
results that violate a numerical guarantee (non-finite statistics,
out-of-range estimates) and maps to exit code 3.
"""


class FastmmdError(Exception):
    """Base class for all package errors."""


class ValidationError(FastmmdError):
    """Invalid input data or configuration."""


class NumericalContractError(FastmmdError):
    """A computed quantity violated a numerical guarantee."""
