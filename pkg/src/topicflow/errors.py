"""Exception hierarchy shared across the pipeline.

The CLI maps these onto its exit-code contract: ConfigError -> 1,
DataError -> 2, NumericError -> 3.
"""


class TopicflowError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TopicflowError):
    """Invalid configuration, flag, or parameter value."""


class DataError(TopicflowError):
    """Malformed, inconsistent, or missing input data."""


class NumericError(TopicflowError):
    """Numerical failure: non-finite values, degenerate decompositions."""
