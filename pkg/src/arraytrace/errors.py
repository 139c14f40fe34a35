"""Exception types shared across the package."""


class ArrayTraceError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(ArrayTraceError):
    """Input content or configuration violates a documented constraint."""


class ResourceBudgetError(ArrayTraceError):
    """A configured resource budget (memory, spill) cannot be honored."""


class EncodingParseError(ValidationError):
    """A rendered sequence encoding could not be parsed back."""
