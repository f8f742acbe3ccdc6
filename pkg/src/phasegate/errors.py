"""Exception types shared across the package.

The command-line front end maps these onto distinct exit codes, so keep
the hierarchy flat and the meanings disjoint.
"""


class ConfigError(ValueError):
    """A run configuration is missing, malformed, or names unknown fields."""


class DataFormatError(ValueError):
    """A data file (count CSV, matrix record) does not match its documented format."""


class ConvergenceError(RuntimeError):
    """An iterative reconstruction hit its iteration cap before converging."""
