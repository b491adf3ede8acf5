"""Exception types shared across the package.

``DataError`` marks failures caused by bad input data (as opposed to bad
arguments or internal faults); the CLI maps it to its own exit code.
"""


class ChiprankError(Exception):
    """Base class for package-specific errors."""


class DataError(ChiprankError):
    """Input data is unusable: missing files, broken logs, bad references."""


class DatasetError(DataError):
    """A dataset could not be loaded at all (missing/invalid manifest)."""


class ReferentialError(DataError):
    """A record references an image or site that does not exist."""


class UndefinedLacunarityError(ChiprankError):
    """Lacunarity is undefined for this image (no positive mass)."""


class MetricUnavailableError(ChiprankError):
    """A metric could not be computed (e.g. an encoder failed)."""


class DegenerateRegressorError(ChiprankError):
    """The regression provided a constant independent variable."""


class ConflictError(ChiprankError):
    """A judgment was submitted for an unknown or already-settled pair."""


class ServiceUnavailableError(ChiprankError):
    """The rating service cannot serve pairs (e.g. fewer than two images)."""
