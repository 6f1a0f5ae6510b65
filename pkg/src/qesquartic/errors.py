"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """An argument violates an operation's precondition."""


class DegenerateSpec(ArithmeticError):
    """Elimination collapsed (e.g. an identically zero resultant)."""


class DomainError(ValueError):
    """Evaluation point lies outside the function's domain (origin or branch cut)."""


class UnsupportedError(NotImplementedError):
    """Requested combination is deliberately not handled."""
