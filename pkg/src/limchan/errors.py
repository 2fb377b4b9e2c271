"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError and
IntegrityError -> 3, TrainingError -> 4.
"""


class LimchanError(Exception):
    """Base class for all package errors."""


class DimensionError(LimchanError):
    """Shapes do not conform; the message names both shapes."""


class ConfigError(LimchanError):
    """Invalid or inconsistent configuration."""


class DataError(LimchanError):
    """Malformed input data (parse failures, missing channels, empty sets)."""


class TrainingError(LimchanError):
    """Training diverged or received non-finite values."""


class IntegrityError(LimchanError):
    """Checkpoint or tensor file failed validation."""


class MetricError(LimchanError):
    """A requested metric is undefined for the given inputs."""
