"""Exception and warning types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation (bad shape, index, mode)."""


class NumericalFailure(ArithmeticError):
    """Non-finite values appeared during an iterative solve.

    Parameters
    ----------
    message : str
    sweep : int or None
        Sweep (or update) number at which the failure was detected.
    """

    def __init__(self, message, sweep=None):
        super().__init__(message)
        self.sweep = sweep


class RegularizationWarning(RuntimeWarning):
    """A Gram matrix was too ill-conditioned and a ridge term was added."""


class RankDeficiencyWarning(RuntimeWarning):
    """Fewer samples than the rank were used in a least-squares solve."""
