"""Free resolvent of ``z - c**2 d^2/dx^2`` on the real line.

The kernel is ``i/(2 k c**2) * exp(i k |x - x'|)`` with ``k = k_upper(z, c)``.
Source fields are finite sums of Gaussian, boxcar and point terms; the
point terms are applied in closed form and the others by adaptive
quadrature split at the kink ``x' = x``.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad_vec

from .branchkit import as_complex, k_upper
from .errors import QuadratureFailure

# exp(-t**2/2) < 1e-30 beyond this many widths
GAUSS_SPAN = math.sqrt(2 * math.log(1e30))


@dataclass(frozen=True)
class Gaussian:
    """``amp * exp(-(x - center)**2 / (2 width**2))``."""

    amp: complex
    center: float
    width: float

    def __post_init__(self):
        object.__setattr__(self, "amp", as_complex(self.amp, "amp"))
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"Gaussian width must be positive, got {self.width!r}")
        if not math.isfinite(self.center):
            raise ValueError("Gaussian center must be finite")

    def value(self, x):
        t = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.amp * np.exp(-0.5 * t * t)

    def support(self):
        half = GAUSS_SPAN * self.width
        return self.center - half, self.center + half


@dataclass(frozen=True)
class Boxcar:
    """``amp`` on ``[lo, hi]``, zero elsewhere."""

    amp: complex
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "amp", as_complex(self.amp, "amp"))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.hi > self.lo):
            raise ValueError(f"Boxcar needs finite lo < hi, got [{self.lo}, {self.hi}]")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), self.amp, 0j)

    def support(self):
        return self.lo, self.hi


@dataclass(frozen=True)
class PointSource:
    """``amp * delta(x - at)``."""

    amp: complex
    at: float

    def __post_init__(self):
        object.__setattr__(self, "amp", as_complex(self.amp, "amp"))
        if not math.isfinite(self.at):
            raise ValueError("PointSource location must be finite")


Term = Union[Gaussian, Boxcar, PointSource]
_KINDS = {"gaussian": Gaussian, "boxcar": Boxcar, "point": PointSource}
_NAMES = {cls: name for name, cls in _KINDS.items()}


@dataclass(frozen=True)
class FieldSpec:
    """A source field given as a finite sum of terms."""

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple(self.terms)
        for t in terms:
            if not isinstance(t, (Gaussian, Boxcar, PointSource)):
                raise TypeError(f"unsupported field term {t!r}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def point(cls, at, amp=1.0):
        return cls((PointSource(amp, at),))

    def scaled(self, alpha) -> "FieldSpec":
        alpha = complex(alpha)
        return FieldSpec(tuple(
            type(t)(**{**t.__dict__, "amp": alpha * t.amp}) for t in self.terms
        ))

    def __add__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return FieldSpec(self.terms + other.terms)

    def value(self, x):
        """Pointwise value of the regular (non-delta) part of the field."""
        out = np.zeros(np.shape(x), dtype=complex)
        for t in self.terms:
            if not isinstance(t, PointSource):
                out = out + t.value(x)
        return out if np.ndim(x) else complex(out)

    def to_dict(self):
        terms = []
        for t in self.terms:
            d = {"kind": _NAMES[type(t)], "amp": [t.amp.real, t.amp.imag]}
            d.update({k: v for k, v in t.__dict__.items() if k != "amp"})
            terms.append(d)
        return {"terms": terms}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or not isinstance(data.get("terms"), list):
            raise ValueError('field spec must be an object with a "terms" list')
        terms = []
        for raw in data["terms"]:
            raw = dict(raw)
            kind = raw.pop("kind", None)
            if kind not in _KINDS:
                raise ValueError(f"unknown field term kind {kind!r}")
            amp = raw.pop("amp", 1.0)
            if isinstance(amp, (list, tuple)):
                if len(amp) != 2:
                    raise ValueError(f"complex amp must be [re, im], got {amp!r}")
                amp = complex(float(amp[0]), float(amp[1]))
            terms.append(_KINDS[kind](amp=amp, **{k: float(v) for k, v in raw.items()}))
        return cls(tuple(terms))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    truncation_radius: float = 1e4

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if not (math.isfinite(self.truncation_radius) and self.truncation_radius > 0):
            raise ValueError("truncation_radius must be positive and finite")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be at least 1")

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: data[k] for k in ("rel_tol", "abs_tol", "max_subdivisions",
                                           "truncation_radius") if k in data})


def green_kernel(z, c, x, x_prime) -> complex:
    """``i/(2 k c**2) exp(i k |x - x'|)``, the kernel of ``(z - c**2 d^2/dx^2)^{-1}``."""
    k = k_upper(z, c)
    return 1j / (2 * k * c * c) * cmath.exp(1j * k * abs(x - x_prime))


def green_kernel_dx(z, c, x, x_prime, side=1) -> complex:
    """``d/dx`` of :func:`green_kernel`; at ``x == x'`` the one-sided limit picked by ``side``."""
    k = k_upper(z, c)
    d = x - x_prime
    sgn = (1.0 if side > 0 else -1.0) if d == 0 else math.copysign(1.0, d)
    return -sgn / (2 * c * c) * cmath.exp(1j * k * abs(d))


def _radius(k, quad):
    return min(quad.truncation_radius, math.log(1.0 / quad.abs_tol) / k.imag)


def _integrate(func, a, b, quad):
    val, _err, info = quad_vec(func, a, b, epsabs=quad.abs_tol, epsrel=quad.rel_tol,
                               limit=int(quad.max_subdivisions), full_output=True)
    # status 2 (roundoff-limited) still means the error is at rounding level
    if info.status == 1:
        raise QuadratureFailure(
            f"adaptive quadrature on [{a:.6g}, {b:.6g}] failed: {info.message}"
        )
    return complex(val)


def _apply(z, c, x, field_spec, quad, derivative=False, side=1):
    k = k_upper(z, c)
    pref = 1j / (2 * k * c * c)
    radius = _radius(k, quad)
    total = 0j
    for term in field_spec.terms:
        if isinstance(term, PointSource):
            if derivative:
                total += term.amp * green_kernel_dx(z, c, x, term.at, side)
            else:
                total += term.amp * pref * cmath.exp(1j * k * abs(x - term.at))
            continue
        lo, hi = term.support()
        lo, hi = max(lo, x - radius), min(hi, x + radius)
        if lo >= hi:
            continue
        pieces = [(lo, x), (x, hi)] if lo < x < hi else [(lo, hi)]
        for a, b in pieces:
            # the sign of x - x' is constant on each piece
            sgn = 1.0 if b <= x else -1.0
            factor = pref * (1j * k * sgn if derivative else 1.0)

            def integrand(xp, term=term, factor=factor):
                return factor * term.value(xp) * np.exp(1j * k * abs(x - xp))

            total += _integrate(integrand, a, b, quad)
    return total


def green_apply(z, c, x, field_spec: FieldSpec, quad: QuadratureConfig | None = None) -> complex:
    """Evaluate ``((z - c**2 d^2/dx^2)^{-1} w)(x)`` for a source field ``w``.

    Raises
    ------
    BranchCutError
        If ``z`` is on ``(-inf, 0]``.
    QuadratureFailure
        If adaptive refinement exhausts ``quad.max_subdivisions``.
    """
    return _apply(z, c, float(x), field_spec, quad or QuadratureConfig())


def green_apply_dx(z, c, x, field_spec: FieldSpec, quad: QuadratureConfig | None = None,
                   side=1) -> complex:
    """``d/dx`` of :func:`green_apply`; ``side`` picks the limit at point sources."""
    return _apply(z, c, float(x), field_spec, quad or QuadratureConfig(),
                  derivative=True, side=side)


class ResolventImage:
    """``(z - c**2 d^2/dx^2)^{-1} w`` as a lazily evaluated function of ``x``.

    Values are memoised per ``x``; the object is otherwise immutable.
    """

    def __init__(self, z, c, field_spec: FieldSpec, quad: QuadratureConfig | None = None):
        self.z = complex(z)
        self.c = float(c)
        self.field = field_spec
        self.quad = quad or QuadratureConfig()
        self.k = k_upper(self.z, self.c)
        self._cache = {}

    def __call__(self, x) -> complex:
        x = float(x)
        try:
            return self._cache[x]
        except KeyError:
            val = self._cache[x] = green_apply(self.z, self.c, x, self.field, self.quad)
            return val

    def dx(self, x, side=1) -> complex:
        return green_apply_dx(self.z, self.c, x, self.field, self.quad, side)


class LazyField:
    """Finite linear combination of functions of ``x``.

    Supports ``+`` and multiplication by complex scalars, so it can serve as
    the field-space element type of the finite-rank solvers.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        self.terms = tuple((complex(a), f) for a, f in terms)

    @classmethod
    def of(cls, func):
        return cls(((1.0, func),))

    def __add__(self, other):
        if isinstance(other, LazyField):
            return LazyField(self.terms + other.terms)
        if other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, alpha):
        if not isinstance(alpha, (int, float, complex, np.number)):
            return NotImplemented
        return LazyField((a * alpha, f) for a, f in self.terms)

    __rmul__ = __mul__

    def __call__(self, x) -> complex:
        return sum((a * f(x) for a, f in self.terms if a != 0), 0j)

    def dx(self, x, side=1) -> complex:
        return sum((a * f.dx(x, side) for a, f in self.terms if a != 0), 0j)
