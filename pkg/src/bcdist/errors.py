"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function (e.g. a probability > 1)."""


class DimensionError(ValueError):
    """Vector lengths disagree with the problem instance."""


class UnsupportedError(ValueError):
    """A parameter combination that the formulas do not cover (K, b, ...)."""


class MemoryGuardError(RuntimeError):
    """A codebook would exceed the stored-sequence budget."""


class ConfigError(ValueError):
    """A configuration file is malformed; the message names the line or field."""
