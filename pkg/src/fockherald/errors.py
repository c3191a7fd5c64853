"""Exception types shared across the package."""


class FockHeraldError(Exception):
    """Base class for all package errors."""


class DomainError(FockHeraldError, ValueError):
    """A parameter lies outside the domain of an operation."""


class ModeMismatchError(FockHeraldError, ValueError):
    """Two objects disagree on the number of modes."""


class ResourceLimitError(FockHeraldError, RuntimeError):
    """A basis, matrix or photon number exceeds a configured bound."""


class UnitarityError(FockHeraldError, ValueError):
    """A matrix is not unitary within tolerance."""

    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class ValidationGateError(FockHeraldError, RuntimeError):
    """A reconstructed circuit failed its validation gate."""


class UnachievableTargetError(FockHeraldError, ValueError):
    """A scan target lies outside the attainable range."""

    def __init__(self, message, attainable=None):
        super().__init__(message)
        self.attainable = attainable


class TuningError(FockHeraldError, RuntimeError):
    """No parameter choice reaches the requested state."""


class SchemaError(FockHeraldError, ValueError):
    """A JSON document does not follow the expected schema."""
