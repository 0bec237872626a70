"""Exception types shared across the coordination modules."""


class CoordinationError(Exception):
    """Base class for all coordination failures."""


class ConstraintViolationError(CoordinationError):
    """An assignment violates a pairing or partitioning constraint."""


class CapacityError(CoordinationError):
    """A problem instance exceeds the size cap of an exact solver."""


class InfeasibleError(CoordinationError):
    """No solution exists for the requested configuration."""


class ConvergenceError(CoordinationError):
    """An iterative numerical routine failed to converge."""
