class DomainError(ValueError):
    """Input outside the domain of an operation (bad dimension, range, shape)."""


class SingularOverlapError(DomainError):
    """A pair of basis vectors is (numerically) orthogonal."""


class UsageError(RuntimeError):
    """Objects combined in a way their provenance does not allow."""


class StateFileError(DomainError):
    """A JSON input file violates its schema; message carries ``path:line``."""
