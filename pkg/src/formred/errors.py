"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """A mathematical precondition of an operation does not hold."""


class ConsistencyError(ArithmeticError):
    """A certificate that theory guarantees has failed (a bug or a bad input)."""
