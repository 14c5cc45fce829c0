"""Exception types shared across the package."""


class SlitplaneError(Exception):
    """Base class for all package errors."""


class DegenerateGeometry(SlitplaneError):
    """A geometric configuration fell within tolerance of a measure-zero event.

    Stochastic callers should resample; deterministic callers should treat
    this as a genuine error in their input.
    """


class ZeroVector(SlitplaneError):
    """A direction was requested for a vector of negligible norm."""


class NeedsExpansion(SlitplaneError):
    """A query left the sampled region of a lazily built surface.

    ``radius`` is the root budget that would make the query safe.
    """

    def __init__(self, radius, message=""):
        self.radius = float(radius)
        super().__init__(message or f"query requires root budget >= {radius:.6g}")


class BudgetOverflow(SlitplaneError):
    """Sampling materialized more nodes than the configured cap."""


class NoPath(SlitplaneError):
    """No chart path connects the two requested charts."""


class Disconnected(SlitplaneError):
    """The permutation pair does not define a connected surface."""


class PermParseError(SlitplaneError):
    """Cycle notation could not be parsed; ``position`` indexes the offending character."""

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class OutOfRange(SlitplaneError):
    """A cycle entry lies outside the declared permutation size."""


class OutOfDomain(SlitplaneError):
    """Reference-formula arguments violate its domain."""


class InsufficientData(SlitplaneError):
    """Not enough histogram mass for a valid goodness-of-fit test."""


class TooFewSamples(SlitplaneError):
    """A statistic was requested on fewer samples than it supports."""


class DepthExceeded(SlitplaneError):
    """The angular window recursion exceeded its depth cap."""
