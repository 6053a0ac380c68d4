class TriangularLsdError(Exception):
    """Base class for every error raised by triangular_lsd."""


class IndexRangeError(TriangularLsdError, ValueError):
    """A matrix index lies outside 1..n."""


class ShapeError(TriangularLsdError, ValueError):
    """An array does not have the required shape."""


class ContractViolationError(TriangularLsdError, ValueError):
    """An input violates a documented precondition (e.g. asymmetric matrix)."""


class DomainError(TriangularLsdError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ResourceLimitError(TriangularLsdError, RuntimeError):
    """The requested computation exceeds a configured cost cap."""
