"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class PrecisionError(ArithmeticError):
    """The fixed-point representation cannot resolve the requested quantity."""


class BudgetError(RuntimeError):
    """A computation would exceed its configured compute or memory budget."""


class WindowEmptyError(LookupError):
    """No convergent denominator lies in the requested window.

    ``below`` and ``above`` are the nearest convergents on either side
    (either may be None).
    """

    def __init__(self, message, below=None, above=None):
        super().__init__(message)
        self.below = below
        self.above = above


class SplitError(ArithmeticError):
    """A squarefree number could not be split as h*s with h <= H, s <= S."""

    def __init__(self, message, factors=()):
        super().__init__(message)
        self.factors = tuple(factors)
