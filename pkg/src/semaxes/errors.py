"""Exception types shared across the package.

The CLI maps these onto exit codes (config 2, data 3, numerical 4).
"""


class SemaxesError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(SemaxesError, ValueError):
    exit_code = 2


class DataError(SemaxesError, ValueError):
    exit_code = 3


class NumericalError(SemaxesError, ArithmeticError):
    exit_code = 4
