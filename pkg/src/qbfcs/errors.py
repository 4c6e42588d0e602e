"""Exception hierarchy shared by all qbfcs modules."""


class QbfcsError(Exception):
    """Base class for every error raised by qbfcs."""


class TruncationError(QbfcsError):
    """The requested Fock cutoff cannot represent the state within tolerance."""


class ConsistencyError(QbfcsError):
    """A numerical invariant (hermiticity, normalization, ...) was violated."""


class NoChargingError(QbfcsError):
    """The configuration cannot transfer any energy to the battery."""


class ConfigError(QbfcsError):
    """Invalid run configuration."""
