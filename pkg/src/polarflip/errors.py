"""Exception types shared across the package."""


class InvalidDimensionsError(ValueError):
    """Code dimensions are inconsistent (N not a power of two, K too large, ...)."""


class DimensionMismatchError(ValueError):
    """An input vector does not have the length the code requires."""


class InvalidFlipIndexError(ValueError):
    """A flip set names a frozen or out-of-range position."""


class ConfigurationError(ValueError):
    """An experiment or CLI configuration is invalid."""
