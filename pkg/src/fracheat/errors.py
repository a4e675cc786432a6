"""Exception types shared across the package."""


class FracHeatError(Exception):
    pass


class PoleEncountered(FracHeatError, ArithmeticError):
    """Evaluation point is a pole.

    ``residue`` is filled in when the caller knows it (zeta functions do).
    """

    def __init__(self, point, message=None, residue=None):
        self.point = point
        self.residue = residue
        super().__init__(message or f"pole at {point}")


class NearPoleWarning(UserWarning):
    pass


class DomainError(FracHeatError, ValueError):
    pass


class CutoffTooLarge(FracHeatError):
    pass


class BudgetExceeded(FracHeatError):
    pass


class ContourTooShort(FracHeatError):
    pass


class AbscissaTooSmall(FracHeatError, ValueError):
    pass


class OnDiagonal(FracHeatError, ValueError):
    pass


class NeedsFinitePart(FracHeatError):
    pass


class InconsistentLaurent(FracHeatError):
    pass


class IllConditioned(FracHeatError):
    pass


class InsufficientSamples(FracHeatError, ValueError):
    pass


class TemplateMismatch(FracHeatError, ValueError):
    pass


class QuadratureFailure(FracHeatError):
    pass
