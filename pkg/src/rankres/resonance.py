"""Resonance structure of the coupled model in units with ``c = 1``.

Everything here is phrased through the inverse determinant

    Det_{-1}(k) = -1 / (k**2 + 2i gamma k - omega**2),

an analytic function of ``k`` away from its two poles. Its restriction to
``Im k > 0`` belongs to the physical resolvent; on the real axis it gives the
steady-state amplitudes; its poles (``Im k < 0`` for ``gamma > 0``) are the
resonances. Pulled back to ``z = -k**2`` it lives on two sheets.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .branchkit import SheetPoint, as_complex, induced_k, k_upper
from .errors import AtPole, DomainError, RootRefinementFailure
from .models import CoupledParams, FriedrichsParams

POLE_TOL = 1e-12
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class RenormalizedParams:
    """``omega`` and ``gamma`` after ``omega/c -> omega``, ``gamma_c/c**2 -> gamma``.

    ``a_mp`` is the (non-negative) amplitude of the incident wave.
    """

    omega: float
    gamma: float
    a_mp: float = 1.0

    def __post_init__(self):
        for name in ("omega", "gamma", "a_mp"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.omega <= 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be non-negative, got {self.gamma}")
        if self.a_mp < 0:
            raise DomainError(f"a_mp must be non-negative, got {self.a_mp}")

    @classmethod
    def from_coupled(cls, p: CoupledParams, a_mp=1.0):
        return cls(omega=p.omega / p.c, gamma=p.gamma_c / p.c ** 2, a_mp=a_mp)


@dataclass(frozen=True)
class AmplitudeTriple:
    amp_q: float
    amp_Q: float
    amp_qQ: float


@dataclass(frozen=True)
class PoleSet:
    poles: tuple

    def __iter__(self):
        return iter(self.poles)

    def __len__(self):
        return len(self.poles)


@dataclass(frozen=True)
class ResonantSet:
    """Resonant wavenumbers, as ``(+k, -k)`` pairs.

    ``first`` maximises the oscillator amplitude, ``second`` gives complete
    reflection, ``third`` maximises the deformation amplitude. The first and
    third kinds exist only when ``omega**2 > 2 gamma**2``; otherwise the pair
    is ``None``.
    """

    first: tuple | None
    second: tuple
    third: tuple | None

    @property
    def first_exists(self) -> bool:
        return self.first is not None

    @property
    def third_exists(self) -> bool:
        return self.third is not None


def denominator(k, p: RenormalizedParams) -> complex:
    """``k**2 + 2i gamma k - omega**2``."""
    return k * k + 2j * p.gamma * k - p.omega ** 2


def det_inv_extended(k, p: RenormalizedParams) -> complex:
    """``-1 / (k**2 + 2i gamma k - omega**2)`` for any complex ``k`` off the poles."""
    k = as_complex(k, "k")
    d = denominator(k, p)
    scale = abs(k) ** 2 + 2 * p.gamma * abs(k) + p.omega ** 2
    if abs(d) <= POLE_TOL * (1.0 + scale):
        raise AtPole(f"k={k!r} is a pole of Det_-1 (denominator {d!r})", pole=k)
    return -1.0 / d


def det_inv_upper(z, p: RenormalizedParams) -> complex:
    """The physical restriction: ``Det_{-1}(k_upper(z))`` for ``z`` off the cut."""
    return det_inv_extended(k_upper(z, 1.0), p)


def resonance_poles(p: RenormalizedParams) -> PoleSet:
    """The two zeros of ``k**2 + 2i gamma k - omega**2``.

    Underdamped (``omega > gamma``): ``-i gamma +/- sqrt(omega**2 - gamma**2)``.
    Otherwise both lie on the negative imaginary axis.
    """
    om, g = p.omega, p.gamma
    if om > g:
        r = math.sqrt((om - g) * (om + g))
        return PoleSet((complex(r, -g), complex(-r, -g)))
    r = math.sqrt((g - om) * (g + om))
    big = g + r
    # small root via the product of roots (-omega**2) to avoid cancellation
    return PoleSet((complex(0.0, -om * om / big), complex(0.0, -big)))


def resonant_wavenumbers(p: RenormalizedParams) -> ResonantSet:
    om2, g2 = p.omega ** 2, p.gamma ** 2
    second = (p.omega, -p.omega)
    gap = om2 - 2 * g2
    if gap <= 0:
        return ResonantSet(first=None, second=second, third=None)
    k1 = math.sqrt(gap)
    k3 = math.sqrt(om2 * om2 / gap)
    return ResonantSet(first=(k1, -k1), second=second, third=(k3, -k3))


def _real_denominator(k, p):
    a = -k * k + p.omega * p.omega
    b = 2 * p.gamma * k
    return a, b, math.hypot(a, b)


def amplitudes(k, p: RenormalizedParams) -> AmplitudeTriple:
    """Steady-state amplitudes of ``q``, ``Q`` and ``q - Q`` at real wavenumber ``k``."""
    k = float(k)
    a, _, root = _real_denominator(k, p)
    if root <= POLE_TOL * (1.0 + k * k + p.omega ** 2):
        raise AtPole(f"k={k} is a real pole (gamma = 0, k = +/-omega)", pole=complex(k))
    A = p.a_mp
    return AmplitudeTriple(
        amp_q=p.omega ** 2 * A / root,
        amp_Q=a * A / root,
        amp_qQ=k * k * A / root,
    )


def amplitude_squares_extended(k, p: RenormalizedParams):
    """Analytic extensions of the three squared amplitudes to complex ``k``.

    Returns ``(Amp_q**2, Amp_Q**2, Amp_qQ**2)`` built from
    ``(-k**2 + omega**2)**2 + (2 gamma k)**2``.
    """
    k = as_complex(k, "k")
    a = -k * k + p.omega ** 2
    d = a * a + (2 * p.gamma * k) ** 2
    if abs(d) <= POLE_TOL * (1.0 + abs(k) ** 4 + p.omega ** 4):
        raise AtPole(f"k={k!r} is a pole of the amplitude extensions", pole=k)
    A2 = p.a_mp ** 2
    return p.omega ** 4 * A2 / d, a * a * A2 / d, (k * k) ** 2 * A2 / d


def phase_shift(k, p: RenormalizedParams) -> float:
    """Phase of the oscillator response, in ``(-pi, pi]``.

    ``cos = (omega**2 - k**2)/root`` and ``sin = -2 gamma k/root``.
    """
    k = float(k)
    a, b, root = _real_denominator(k, p)
    if root <= POLE_TOL * (1.0 + k * k + p.omega ** 2):
        raise AtPole(f"k={k} is a real pole (gamma = 0, k = +/-omega)", pole=complex(k))
    phi = math.atan2(-b, a) + 0.0
    return math.pi if phi == -math.pi else phi


def sheet_eval(pt: SheetPoint, p: RenormalizedParams) -> complex:
    """``D_{-1}`` on the two-sheeted ``z`` plane.

    Sheet 1 uses ``k_plus(z)``, sheet 2 uses ``k_minus(z)`` (``c = 1``).
    """
    return det_inv_extended(induced_k(pt, 1.0), p)


def second_sheet_poles(p: RenormalizedParams):
    """``z = -k**2`` for each pole; all of them sit on sheet 2 when ``gamma > 0``."""
    return tuple(-(k * k) for k in resonance_poles(p))


def friedrichs_numerator(k, p: FriedrichsParams, form="display") -> complex:
    om2 = (p.omega / p.c) ** 2
    g12 = p.gamma1 * p.gamma2c / p.c ** 4
    const = {"display": 1j * g12, "system": -2j * g12}[form]
    return (-k * k + om2) * k + const


def friedrichs_poles(p: FriedrichsParams, form="display") -> PoleSet:
    """The three zeros of the Friedrichs determinant's numerator cubic.

    Roots come from the companion matrix, are polished by Newton steps and
    then verified by back-substitution.
    """
    om2 = (p.omega / p.c) ** 2
    const = friedrichs_numerator(0j, p, form)
    # -k**3 + om2 k + const
    roots = np.roots([-1.0, 0.0, om2, const])
    out = []
    for r in roots:
        r = complex(r)
        for _ in range(3):
            f = friedrichs_numerator(r, p, form)
            df = -3 * r * r + om2
            if df == 0 or f == 0:
                break
            step = f / df
            if not cmath.isfinite(step):
                break
            r -= step
        resid = abs(friedrichs_numerator(r, p, form))
        if resid > ROOT_TOL * (1.0 + abs(r) ** 3):
            raise RootRefinementFailure(f"root {r!r} leaves residual {resid:.3g}")
        out.append(r)
    out.sort(key=lambda r: (round(r.real, 12), r.imag))
    return PoleSet(tuple(out))
