"""Exception hierarchy shared by all modules."""


class FredpairsError(Exception):
    """Base class for errors raised by :mod:`fredpairs`."""


class InputError(FredpairsError, ValueError):
    """An argument is malformed (wrong shape, non-finite entries, not a projection...)."""


class PreconditionError(FredpairsError):
    """Arguments are well formed but violate an operation's precondition."""


class HypothesisViolationError(PreconditionError):
    """A criterion's hypothesis does not hold for the given data."""


class NotFredholmError(PreconditionError):
    """The operation requires a Fredholm pair and the pair is not one."""


class NumericalInstabilityError(FredpairsError, ArithmeticError):
    """An internal consistency check failed.

    ``diagnostics`` holds whatever numbers were involved so a failure can be
    reproduced without rerunning the computation.
    """

    def __init__(self, msg, **diagnostics):
        super().__init__(msg if not diagnostics else f"{msg} ({diagnostics})")
        self.diagnostics = diagnostics


class ConfigError(FredpairsError):
    """Invalid experiment configuration."""
