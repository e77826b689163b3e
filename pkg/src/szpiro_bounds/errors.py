"""Exception hierarchy shared by every module of the engine."""


class SzpiroError(Exception):
    """Base class for all engine errors."""


class DomainError(SzpiroError, ValueError):
    """An argument lies outside the domain of a formula."""


class ResourceError(SzpiroError):
    """A computation would exceed a configured resource ceiling."""


class BudgetError(ResourceError):
    """A brute-force enumeration would exceed its evaluation budget."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class PrecisionError(SzpiroError):
    """A truncated p-adic computation cannot be certified at the current precision."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class PrecisionExhausted(PrecisionError):
    """Every coefficient vanished modulo p^N; the valuation is not determined."""


class UnsupportedCase(SzpiroError):
    """The brute-force oracle does not cover this tower."""


class WindowError(SzpiroError, ValueError):
    """An enumeration window does not reach the analytic minimiser."""


class DescriptorError(SzpiroError, ValueError):
    """A theta-data descriptor failed validation.

    ``invariant`` names the violated condition so callers can report it.
    """

    def __init__(self, message: str, invariant: str = "schema"):
        super().__init__(message)
        self.invariant = invariant
