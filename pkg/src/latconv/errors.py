"""Exception types raised by latconv operations."""


class DimensionMismatchError(ValueError):
    """Operands live on lattices of different dimension."""


class ResourceLimitError(RuntimeError):
    """A dense box or grid allocation would exceed the configured memory cap."""


class NotNormalizedError(ValueError):
    """Operation requires sup |phi-hat| = 1 and the input is not normalized."""


class ZeroFunctionError(ValueError):
    """Operation is undefined for the identically-zero function."""
