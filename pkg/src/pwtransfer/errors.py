"""Exception hierarchy shared by every module.

All numerical failures derive from :class:`NumericalError` so the CLI can map
them to exit code 2 in one place.
"""


class PWTError(Exception):
    """Base class for all package errors."""


class InputError(PWTError):
    """Malformed user input (config, CSV, descriptor)."""


class DomainError(PWTError, ValueError):
    """Position outside [-L/2, L/2]."""


class SingularValue(PWTError, ValueError):
    """A profile was evaluated at one of its zeros while positivity was demanded."""


class PositivityError(PWTError, ValueError):
    """A coefficient that must be strictly positive is not."""


class NumericalError(PWTError, ArithmeticError):
    """Base class for failures of a numerical method."""


class DivergentV0(NumericalError):
    """The integral defining 1/v0 diverges."""


class QuadratureFailure(NumericalError):
    pass


class DifferentiationNoise(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class BracketError(NumericalError):
    pass


class StiffnessError(NumericalError):
    pass


class NormalizationError(NumericalError):
    pass


class InsufficientModes(NumericalError):
    pass


class InconsistentInput(PWTError, ValueError):
    pass


class NonIntegrableWeights(NumericalError):
    pass


class DivergedFit(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass


class SignChange(NumericalError):
    """The recovered sqrt(K) crosses zero: no positive K exists."""


class TurningPointError(NumericalError):
    """Lambda does not exceed max V, so the phase integral has turning points."""


class NonConvergentSeries(NumericalError):
    pass


class BranchCutProximity(UserWarning):
    """A logarithm argument came within 1e-12 of the branch point."""


class UsageError(PWTError):
    """Bad command-line flags or config values."""
