"""Exception hierarchy shared across the library."""


class ManistochError(Exception):
    """Base class for all library errors."""


class UsageError(ManistochError):
    """Caller violated a precondition (mismatched manifolds, bad arguments)."""


class DegeneratePairError(ManistochError):
    """Point pair at or beyond the cut locus; no unique minimizing geodesic."""


class InvalidSegmentError(ManistochError):
    """Geodesic segment does not satisfy its invariants."""


class SingularPointError(ManistochError):
    """Derivative of a rough field requested exactly on its singular set."""


class InsufficientSamplesError(ManistochError):
    """Sample cloud too sparse for the requested ball averages."""


class IntegratorFailureError(ManistochError):
    """Flow state left every chart domain (should be impossible on a compact atlas)."""


class NumericalFailureError(ManistochError):
    """Non-finite values encountered during integration."""


class CertificationFailureError(ManistochError):
    """Atlas certification found witnesses violating the declared constants."""

    def __init__(self, message, witnesses=None):
        super().__init__(message)
        self.witnesses = witnesses if witnesses is not None else []


class ConfigError(ManistochError):
    """Configuration file failed schema or semantic validation."""
