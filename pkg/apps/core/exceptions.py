"""
Error hierarchy shared by every SPF-lab app.

Input errors map to CLI exit code 1, numerical failures to exit code 2.
"""


class SPFLabError(Exception):
    """Base class for all domain errors."""

    exit_code = 1

    def as_dict(self):
        return {'error': self.__class__.__name__, 'detail': str(self)}


class InputError(SPFLabError):
    """The caller supplied something the mathematics does not allow."""

    exit_code = 1


class NumericalError(SPFLabError):
    """A numerical procedure could not meet its tolerance."""

    exit_code = 2


class EmptyInput(InputError):
    pass


class RealPole(InputError):
    pass


class DuplicatePole(InputError):
    pass


class EvalAtPole(InputError):
    pass


class NonpositiveScale(InputError):
    pass


class UnsupportedExponent(InputError):
    pass


class DomainError(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class AsymmetricConfiguration(InputError):
    pass


class EvalAtConjugatePole(InputError):
    pass


class DegenerateInput(InputError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class DegenerateCancellation(NumericalError):
    pass


class BudgetExhausted(NumericalError):
    pass


class UnreadableInput(InputError):
    pass
