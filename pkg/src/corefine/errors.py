"""Exception types shared across the package."""


class CorefineError(Exception):
    """Base class for package errors."""


class GeometryError(CorefineError):
    """Invalid geometric input (non-finite coordinates, empty vertex list, ...)."""


class MalformedInputError(CorefineError):
    """Malformed instance data: bad matrix shape, negative distances, bad JSON."""


class PreconditionError(CorefineError):
    """A checker's geometric precondition does not hold for the given input."""


class CertificationError(CorefineError):
    """An operation that requires a nonempty refinement hit an empty value."""

    def __init__(self, message, label=None):
        super().__init__(message)
        self.label = label


class IndeterminateError(CorefineError):
    """The LP backend failed even after perturbation; verdict is unreliable."""
