from __future__ import annotations


class DiscnormError(Exception):
    """Base class for every error raised by discnorm."""


class DomainError(DiscnormError, ValueError):
    """A point lies outside the unit disk or a radius outside [0, 1)."""


class ConfigError(DiscnormError, ValueError):
    """A function, weight, operator or experiment document is malformed."""


class ToleranceNotReachedError(DiscnormError, RuntimeError):
    """Grid refinement reached its cap before the requested tolerance."""


class DivergenceError(DiscnormError, RuntimeError):
    """A radial quadrature did not stabilise; the function is outside the space."""


class UnboundedError(DiscnormError, RuntimeError):
    """A weighted supremum kept growing at every boundary level."""


class InconclusiveError(DiscnormError, RuntimeError):
    """An estimate was requested from a ladder that did not stabilise."""


class ComputationCancelled(DiscnormError, RuntimeError):
    """A grid evaluation was stopped through the shared stop event."""
