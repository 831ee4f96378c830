"""Exception hierarchy shared by all modules."""


class WedgeError(Exception):
    """Base class for all package errors."""


class ConfigurationError(WedgeError):
    """Mismatched rings, undeclared variables, malformed inputs."""


class DomainError(WedgeError):
    """Mathematically invalid request (non-invertible series, bad contact data, ...)."""


class IntegrityError(WedgeError):
    """An internal consistency guarantee failed; signals a pipeline bug."""
