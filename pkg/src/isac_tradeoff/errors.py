"""Exception types raised by the numerical routines."""


class DomainError(ValueError):
    """Argument outside the domain a routine supports."""


class DegenerateInputError(ValueError):
    """Inputs hit a singular or degenerate point of a formula."""


class ConvergenceError(ArithmeticError):
    """An iterative routine ran out of budget before meeting its tolerance."""
