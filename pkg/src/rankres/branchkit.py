"""Branch maps between the spectral parameter ``z`` and the wavenumber ``k``.

All three maps solve ``k**2 = -z / c**2``; they differ in which root they keep.

* :func:`k_upper` -- the physical branch, ``Im k > 0``; undefined on the cut.
* :func:`k_plus` -- ``k_upper`` off the cut, ``Re k >= 0`` on it (first sheet).
* :func:`k_minus` -- ``Im k < 0`` off the cut, ``Re k <= 0`` on it (second sheet).
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .errors import BranchCutError, DomainError

CUT_TOL = 1e-13


class Sheet(enum.IntEnum):
    FIRST = 1
    SECOND = 2


@dataclass(frozen=True)
class SheetPoint:
    """A point ``z`` tagged with the copy of the complex plane it lives on."""

    z: complex
    sheet: Sheet

    def __post_init__(self):
        object.__setattr__(self, "z", as_complex(self.z, "z"))
        object.__setattr__(self, "sheet", Sheet(self.sheet))


def as_complex(value, name="value") -> complex:
    """Coerce to a finite Python complex, rejecting NaN/Inf."""
    try:
        out = complex(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} is not a complex number: {value!r}") from exc
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise DomainError(f"{name} must be finite, got {out!r}")
    return out


def _check_speed(c) -> float:
    c = float(c)
    if not (math.isfinite(c) and c > 0):
        raise DomainError(f"wave speed c must be positive and finite, got {c!r}")
    return c


def on_cut(z) -> bool:
    """True when ``z`` lies in the tolerance band around ``(-inf, 0]``."""
    z = as_complex(z, "z")
    return z.real <= 0 and abs(z.imag) <= CUT_TOL * (1 + abs(z.real))


def k_upper(z, c=1.0) -> complex:
    """Root of ``k**2 = -z/c**2`` with ``Im k > 0``.

    Raises
    ------
    BranchCutError
        If ``z`` is on the cut ``(-inf, 0]``, where no such root exists.
    DomainError
        If ``c <= 0``.
    """
    c = _check_speed(c)
    z = as_complex(z, "z")
    if on_cut(z):
        raise BranchCutError(f"z={z!r} lies on the branch cut (-inf, 0]")
    k = cmath.sqrt(-z / (c * c))
    return -k if k.imag < 0 else k


def k_plus(z, c=1.0) -> complex:
    c = _check_speed(c)
    z = as_complex(z, "z")
    if not on_cut(z):
        return k_upper(z, c)
    # on the cut -z/c**2 is (numerically) a non-negative real
    return complex(math.sqrt(max(-z.real, 0.0)) / c, 0.0)


def k_minus(z, c=1.0) -> complex:
    k = k_plus(z, c)
    if k == 0:
        return 0j
    return complex(-k.real, -k.imag)


def induced_k(point: SheetPoint, c=1.0) -> complex:
    """Wavenumber attached to ``point``: ``k_plus`` on sheet 1, ``k_minus`` on sheet 2."""
    if point.sheet is Sheet.FIRST:
        return k_plus(point.z, c)
    return k_minus(point.z, c)
