"""Exception hierarchy shared by every module of the package."""


class RankResError(Exception):
    """Base class for all errors raised by ``rankres``."""


class DomainError(RankResError, ValueError):
    """A parameter lies outside the domain of the operation."""


class BranchCutError(DomainError):
    """The spectral parameter sits on the cut ``(-inf, 0]``."""


class SingularPerturbation(RankResError, ArithmeticError):
    """The finite-rank coefficient system is singular within tolerance."""


class SingularMatrix(RankResError, ArithmeticError):
    """Dense inversion failed (zero pivot, excessive growth, or ill-conditioning)."""


class SingularBlock(SingularMatrix):
    """A designated block or its Schur complement cannot be inverted."""


class QuadratureFailure(RankResError, RuntimeError):
    """Adaptive quadrature ran out of subdivisions before meeting tolerance."""


class PoleOfExpression(RankResError, ZeroDivisionError):
    """A closed-form expression is evaluated at (or too close to) its pole."""


class ResonanceAtMinusOmegaSq(PoleOfExpression):
    """``z = -omega**2``: the bare oscillator eigenvalue."""


class AtPole(PoleOfExpression):
    """A determinant-inverse function is evaluated at one of its poles."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class RootRefinementFailure(RankResError, RuntimeError):
    """A polynomial root failed back-substitution verification."""
