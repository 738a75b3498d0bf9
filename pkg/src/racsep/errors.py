"""Exception types shared across the toolkit."""


class RacsepError(Exception):
    """Base class for all toolkit errors."""


class FieldMismatchError(RacsepError):
    """Operands live in different scalar fields (exact vs float)."""


class ShapeError(RacsepError):
    """Tensor or matrix shape not supported by the requested operation."""


class ParameterError(RacsepError):
    """Network parameters are malformed or unsupported (e.g. singular W_h)."""


class InvalidInputError(RacsepError):
    """Input values are invalid (NaN/Inf entries, out-of-range symbols)."""


class ResourceBudgetError(RacsepError):
    """An operation would exceed its configured size budget."""

    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget
