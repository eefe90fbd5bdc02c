"""Exception types shared across the toolkit."""


class TrotterKitError(Exception):
    """Base class for all toolkit errors."""


class ModelError(TrotterKitError, ValueError):
    """A model builder was called with parameters it cannot realize."""


class DimensionMismatchError(TrotterKitError, ValueError):
    """Operands act on different qubit counts or incompatible spaces."""


class InvalidOperatorError(TrotterKitError, ValueError):
    """An operator violates a structural precondition (e.g. not Hermitian)."""


class ResourceLimitError(TrotterKitError, RuntimeError):
    """A dense or enumerative computation would exceed its configured cap."""


class ContractViolationError(TrotterKitError, RuntimeError):
    """A runtime check of a documented precondition failed."""


class NoSolutionError(TrotterKitError, RuntimeError):
    """A search terminated without a feasible answer.

    Attributes
    ----------
    boundary_value : float or None
        Value of the objective at the failing bracket edge, for diagnostics.
    """

    def __init__(self, message, boundary_value=None):
        super().__init__(message)
        self.boundary_value = boundary_value
