"""Oscillator coupled to a scalar field on the line, and its Friedrichs variant.

Coupled model, with ``l`` the evaluation at ``x0`` and ``delta`` the point
mass there::

    [ z + omega**2       -omega**2 <l|           ] [q]   [w1]
    [ -4 gamma_c delta    z - B + 4 gamma_c delta <l| ] [u] = [w2]

Friedrichs variant::

    [ z + omega**2       -gamma1 <l| ] [q0 ]   [w1]
    [ -4 gamma2c delta    z - B      ] [phi] = [w2]

with ``B = c**2 d^2/dx^2`` in both. Each is solved as a dyadic perturbation
of ``diag(z + omega**2, z - B)`` via :func:`rankres.finiterank.solve_block`;
the coupled model can also be solved as a rank-one perturbation of
``diag(z, z - B)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .branchkit import as_complex, k_upper
from .errors import DomainError, PoleOfExpression, ResonanceAtMinusOmegaSq
from .finiterank import SINGULAR_TOL, solve_block, solve_rank_one
from .green1d import FieldSpec, LazyField, QuadratureConfig, ResolventImage

POLE_TOL = 1e-12


def _nonneg(value, name):
    value = float(value)
    if not (math.isfinite(value) and value >= 0):
        raise DomainError(f"{name} must be a finite non-negative number, got {value!r}")
    return value


def _positive(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


@dataclass(frozen=True)
class CoupledParams:
    """Oscillator frequency, coupling strength, wave speed and coupling point.

    ``omega = 0`` and ``gamma_c = 0`` are accepted as degenerate limits.
    """

    omega: float
    gamma_c: float
    c: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omega", _nonneg(self.omega, "omega"))
        object.__setattr__(self, "gamma_c", _nonneg(self.gamma_c, "gamma_c"))
        object.__setattr__(self, "c", _positive(self.c, "c"))
        x0 = float(self.x0)
        if not math.isfinite(x0):
            raise DomainError("x0 must be finite")
        object.__setattr__(self, "x0", x0)


@dataclass(frozen=True)
class FriedrichsParams:
    omega: float
    gamma1: complex
    gamma2c: complex
    c: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omega", _positive(self.omega, "omega"))
        object.__setattr__(self, "gamma1", as_complex(self.gamma1, "gamma1"))
        object.__setattr__(self, "gamma2c", as_complex(self.gamma2c, "gamma2c"))
        object.__setattr__(self, "c", _positive(self.c, "c"))
        x0 = float(self.x0)
        if not math.isfinite(x0):
            raise DomainError("x0 must be finite")
        object.__setattr__(self, "x0", x0)


@dataclass(frozen=True)
class CoupledSolution:
    """Resolvent applied to ``(w1, w2)``.

    ``q`` is the oscillator component (``q0`` for the Friedrichs variant),
    ``field`` the field component as a function of ``x``. ``c1 = q`` and
    ``c2 = field(x0)`` are the coefficients of the finite-rank system and
    ``det`` the determinant of the coefficient system that was solved.
    """

    q: complex
    c1: complex
    c2: complex
    det: complex
    k: complex
    field: Any

    def u_at(self, x) -> complex:
        return self.field(x)

    def du_at(self, x, side=1) -> complex:
        """One-sided derivative of the field; ``side`` matters only at kinks."""
        return self.field.dx(x, side)


@dataclass(frozen=True)
class BlockVector:
    """Element of ``C (+) field space`` for the rank-one formulation."""

    scalar: complex
    field: Any

    def __add__(self, other):
        if not isinstance(other, BlockVector):
            return NotImplemented
        return BlockVector(self.scalar + other.scalar, self.field + other.field)

    def __mul__(self, alpha):
        return BlockVector(self.scalar * alpha, self.field * alpha)

    __rmul__ = __mul__


def _check_pole(value, scale, what, exc=PoleOfExpression):
    if abs(value) <= POLE_TOL * (1.0 + scale):
        raise exc(f"{what} vanishes ({value!r}); expression has a pole here")


def coupled_determinant(k, p: CoupledParams) -> complex:
    """Determinant of the coupled model's coefficient system as a function of ``k``.

    Equals ``-(k**2 + 2i gamma_c k / c**2 - omega**2/c**2) / (-k**2 + omega**2/c**2)``.
    """
    k = as_complex(k, "k")
    om2 = (p.omega / p.c) ** 2
    g = p.gamma_c / p.c ** 2
    denom = -k * k + om2
    _check_pole(denom, abs(k) ** 2 + om2, "-k^2 + omega^2/c^2")
    return -(k * k + 2j * g * k - om2) / denom


def friedrichs_determinant(k, p: FriedrichsParams, form="display") -> complex:
    """Friedrichs-variant determinant as a rational function of ``k``.

    ``form="display"`` gives
    ``((-k**2 + omega**2/c**2) k + i gamma1 gamma2c / c**4) / ((-k**2 + omega**2/c**2) k)``.
    ``form="system"`` gives the determinant of the 2x2 coefficient system
    that :func:`solve_friedrichs` actually solves, whose constant term is
    ``-2i gamma1 gamma2c / c**4`` instead.
    """
    k = as_complex(k, "k")
    om2 = (p.omega / p.c) ** 2
    g12 = p.gamma1 * p.gamma2c / p.c ** 4
    const = {"display": 1j * g12, "system": -2j * g12}[form]
    base = (-k * k + om2) * k
    _check_pole(base, abs(k) ** 3 + om2 * abs(k), "(-k^2 + omega^2/c^2) k")
    return (base + const) / base


def _check_z(z, p):
    z = as_complex(z, "z")
    k = k_upper(z, p.c)
    om2 = p.omega ** 2
    _check_pole(z + om2, abs(z) + om2, "z + omega^2", ResonanceAtMinusOmegaSq)
    return z, k


def _field_resolvent(z, c, quad):
    def apply(fs: FieldSpec):
        if not fs.terms:
            return LazyField()
        return LazyField.of(ResolventImage(z, c, fs, quad))
    return apply


def _solve_block_model(z, w1, w2, p, f12, coupling21, coupling22, quad, tol):
    z, k = _check_z(z, p)
    w1 = as_complex(w1, "w1")
    quad = quad or QuadratureConfig()
    x0 = p.x0
    sol = solve_block(
        base1=lambda v: v / (z + p.omega ** 2),
        base2=_field_resolvent(z, p.c, quad),
        f11=0j,
        f12=complex(f12),
        f21=FieldSpec.point(x0, coupling21),
        f22=FieldSpec.point(x0, coupling22) if coupling22 != 0 else FieldSpec(),
        l1=complex,
        l2=lambda u: u(x0),
        w1=w1,
        w2=w2,
        tol=tol,
    )
    return CoupledSolution(q=sol.v1, c1=sol.c1, c2=sol.c2, det=sol.det, k=k, field=sol.v2)


def solve_coupled(z, w1, w2: FieldSpec, p: CoupledParams,
                  quad: QuadratureConfig | None = None, tol=SINGULAR_TOL) -> CoupledSolution:
    """Apply the coupled model's resolvent to ``(w1, w2)``.

    Raises
    ------
    BranchCutError
        ``z`` on ``(-inf, 0]``.
    ResonanceAtMinusOmegaSq
        ``z = -omega**2``; :func:`solve_coupled_via_rank_one` has no such restriction.
    SingularPerturbation
        The coefficient determinant vanishes.
    """
    g4 = 4.0 * p.gamma_c
    return _solve_block_model(z, w1, w2, p, p.omega ** 2, g4, -g4, quad, tol)


def solve_coupled_via_rank_one(z, w1, w2: FieldSpec, p: CoupledParams,
                               quad: QuadratureConfig | None = None,
                               tol=SINGULAR_TOL) -> CoupledSolution:
    """Same resolvent, computed as a rank-one perturbation of ``diag(z, z - B)``.

    The perturbation is the single dyad ``|(omega**2, -4 gamma_c delta)><1 (+) -l|``.
    ``z = 0`` is rejected since the base operator is then not invertible.
    """
    z = as_complex(z, "z")
    if z == 0:
        raise DomainError("z = 0: diag(z, z - B) is not invertible")
    k = k_upper(z, p.c)
    w1 = as_complex(w1, "w1")
    quad = quad or QuadratureConfig()
    field_inv = _field_resolvent(z, p.c, quad)
    x0 = p.x0

    def base(v: BlockVector) -> BlockVector:
        return BlockVector(v.scalar / z, field_inv(v.field))

    def functional(v: BlockVector) -> complex:
        return v.scalar - v.field(x0)

    f = BlockVector(complex(-p.omega ** 2), FieldSpec.point(x0, 4.0 * p.gamma_c))
    v, c = solve_rank_one(base, f, functional, BlockVector(w1, w2), tol=tol)
    # 1 - <l|A^{-1}f> = det * (z + omega**2) / z
    denom = 1.0 + p.omega ** 2 / z + 4.0 * p.gamma_c * 1j / (2 * k * p.c ** 2)
    return CoupledSolution(q=v.scalar, c1=v.scalar, c2=v.field(x0), det=denom, k=k,
                           field=v.field)


def solve_friedrichs(z, w1, w2: FieldSpec, p: FriedrichsParams,
                     quad: QuadratureConfig | None = None, tol=SINGULAR_TOL) -> CoupledSolution:
    """Apply the Friedrichs variant's resolvent to ``(w1, w2)``.

    Returns ``q0`` in ``q`` and ``phi`` in ``field``. Errors as :func:`solve_coupled`.
    """
    return _solve_block_model(z, w1, w2, p, p.gamma1, 4.0 * p.gamma2c, 0.0, quad, tol)
