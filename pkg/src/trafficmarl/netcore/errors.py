"""Exception types shared across the package."""


class DivergenceError(ArithmeticError):
    """Raised when training produces non-finite parameters or gradients."""


class CheckpointFormatError(ValueError):
    """Raised on malformed, truncated, or wrong-version checkpoint bytes."""
