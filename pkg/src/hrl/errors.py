"""Exception hierarchy.

Input/contract problems derive from :class:`InputError` (CLI exit 2);
numerical failures derive from :class:`NumericalFailure` (CLI exit 3).
"""


class HrlError(Exception):
    pass


class InputError(HrlError, ValueError):
    """Bad argument: dimension mismatch, point outside region, violated precondition."""


class CapabilityError(HrlError):
    """The requested operation is not supported for this kind of input."""


class DegenerateInputError(InputError):
    """The input is degenerate (all-zero jet, constant function, vanishing norm)."""


class NotApplicableError(InputError):
    """The quantity is undefined for this input (e.g. empty zero set)."""


class NumericalFailure(HrlError):
    """A computation ran but could not certify its result."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class ZeroSetMismatchError(NumericalFailure):
    pass


class IllConditionedDivisionError(NumericalFailure):
    pass


class SearchFailure(NumericalFailure):
    def __init__(self, message, best_ratio, payload=None):
        super().__init__(message, payload)
        self.best_ratio = best_ratio


class NonTerminationError(NumericalFailure):
    def __init__(self, message, trace):
        super().__init__(message, trace)
        self.trace = trace


class ResolutionError(NumericalFailure):
    pass
