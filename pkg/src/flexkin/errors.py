"""Exception and warning types shared across the package."""


class FlexkinError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(FlexkinError, ValueError):
    """An argument violates a documented precondition."""


class SchemaValidationError(InvalidArgumentError):
    """A file does not conform to its schema.

    ``path`` is a JSON-pointer-style location of the offending field, or a
    ``file:line`` prefix for text formats.
    """

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class ModelSingularError(FlexkinError, ArithmeticError):
    """The stiffness operator has a zero-energy (non-positive) mode."""

    def __init__(self, message: str, mode_index: int | None = None):
        self.mode_index = mode_index
        super().__init__(message)


class DegenerateModesError(FlexkinError):
    """Requested a single-vector comparison inside a degenerate eigencluster."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        self.pair = pair
        super().__init__(message)


class DegenerateModesWarning(UserWarning):
    """Two adjacent eigenvalues coincide within the degeneracy tolerance."""
