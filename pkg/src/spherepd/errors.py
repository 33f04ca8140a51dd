"""Shared exception types."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedParameterError(ValueError):
    """Parameter combination outside the supported evaluation routes."""


class HypothesisViolationError(ValueError):
    """Input fails a hypothesis that an identity or expansion requires."""


class RegimeError(ValueError):
    """Quantity requested outside the regime where the formula applies."""


class ConfigError(Exception):
    """Malformed run configuration."""
