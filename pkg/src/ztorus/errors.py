"""Exception types shared across the package."""


class ZtorusError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ZtorusError):
    """Invalid grid, multiplier, or experiment configuration."""


class BudgetError(ZtorusError):
    """A direct frequency-sum evaluation was requested on a grid above the
    configured compute budget."""


class IntegratorError(ZtorusError):
    """Time stepping produced non-finite values."""

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class HypothesisViolation(ZtorusError):
    """A sweep point does not satisfy the hypotheses of the estimate being
    verified; carries the name of the violated clause."""

    def __init__(self, clause):
        super().__init__(f"sweep point violates hypothesis: {clause}")
        self.clause = clause


class EmptyShellError(ZtorusError):
    """A dyadic block does not intersect the discrete lattice."""
