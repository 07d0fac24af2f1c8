"""Exception types shared across the package."""


class MoyalError(Exception):
    """Base class for all package errors."""


class SpecMismatchError(MoyalError, ValueError):
    """Two fields with incompatible algebra or grid specifications."""


class IndexRangeError(MoyalError, ValueError):
    """Basis or direction index outside the supported range."""


class DomainError(MoyalError, ValueError):
    """Parameter combination outside an operation's mathematical domain."""


class UnsupportedRegimeError(MoyalError, ValueError):
    """Operation requested in a regime the model does not cover (e.g. Omega != 1)."""


class ResolutionError(MoyalError, ValueError):
    """Grid too coarse to resolve the requested kernel or shift."""


class ConfigError(MoyalError, ValueError):
    """Malformed or inconsistent run configuration."""
