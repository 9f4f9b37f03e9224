"""Exception taxonomy shared by all simulatar modules.

The CLI maps these onto its exit codes (config=1, ingestion=2, geometry=3,
io=4), so new error types should subclass the right branch.
"""


class SimulatarError(Exception):
    """Base class for all errors raised by this package."""

    category = "error"


class ConfigError(SimulatarError):
    """A config, manifest, or profile document failed to parse."""

    category = "config"


class ValidationError(SimulatarError):
    """A typed value violated one of its invariants."""

    category = "config"


class DomainError(SimulatarError):
    """A numeric argument is outside the mathematical domain of an operation."""

    category = "config"


class GeometryError(SimulatarError):
    """FOV or overlay geometry cannot be satisfied."""

    category = "geometry"


class AspectMismatchError(GeometryError):
    """Design canvas aspect does not match the overlay rect aspect."""


class IngestionError(SimulatarError):
    """A frame directory is missing, gapped, or dimensionally inconsistent."""

    category = "ingestion"


class AssemblyError(SimulatarError):
    """The external transcoder failed to mux a frame sequence."""

    category = "io"


class InsufficientDataError(SimulatarError):
    """Too few paired observations to run a test."""

    category = "config"


class DegenerateVarianceError(SimulatarError):
    """All paired differences are identical; the t statistic is undefined."""

    category = "config"
