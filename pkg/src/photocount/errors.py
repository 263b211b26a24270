"""Exception types raised across the package."""


class BoundsError(ValueError):
    """An argument exceeds a configured combinatorial or enumeration bound."""


class OrderError(ValueError):
    """A finite sequence prefix is too short for the requested order."""


class ModelError(ValueError):
    """A Wishart model or model file violates its invariants."""


class DegenerateDimensionError(ArithmeticError):
    """A dimension-dependent denominator vanishes."""


class DegreesOfFreedomError(ValueError):
    """The sample is too small for the requested statistic."""


class BudgetError(RuntimeError):
    """An exhaustive enumeration would exceed its budget."""
