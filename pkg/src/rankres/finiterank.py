"""Inverting operators perturbed by one or two dyads ``f<l|``.

The solvers are generic: an element type only has to support ``+`` between
elements and ``*`` by a complex scalar (numpy arrays, Python complex numbers
and :class:`rankres.green1d.LazyField` all qualify). A base resolvent is any
callable ``w -> A^{-1} w`` and a functional is any callable ``v -> complex``.
Both must be linear and free of side effects.

A dense-matrix oracle (:func:`dense_invert`) and the two Frobenius block
inverse formulas (:func:`frobenius_invert`) are provided for verification.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
import scipy.linalg

from .errors import SingularBlock, SingularMatrix, SingularPerturbation

SINGULAR_TOL = 1e-12
COND_LIMIT = 1e14
GROWTH_LIMIT = 1e8

Resolvent = Callable[[Any], Any]
Functional = Callable[[Any], complex]


def _check_denominator(value, *terms, tol=SINGULAR_TOL, what="denominator"):
    scale = 1.0 + sum(abs(t) for t in terms)
    if abs(value) <= tol * scale:
        raise SingularPerturbation(
            f"{what} {value!r} vanishes within tolerance {tol:g} (scale {scale:.3g})"
        )


def solve_rank_one(base: Resolvent, f_a, l_a: Functional, w, tol=SINGULAR_TOL):
    """Solve ``(A - f_a<l_a|) v = w``.

    Parameters
    ----------
    base : callable
        Applies ``A^{-1}``.
    f_a : element
        Range vector of the dyad.
    l_a : callable
        Linear functional of the dyad.
    w : element
        Right-hand side.

    Returns
    -------
    v : element
        ``A^{-1}w + c_a A^{-1}f_a``.
    c_a : complex
        ``<l_a|A^{-1}w> / (1 - <l_a|A^{-1}f_a>)``, which also equals ``<l_a|v>``.
    """
    a_inv_w = base(w)
    a_inv_f = base(f_a)
    proj = complex(l_a(a_inv_f))
    denom = 1.0 - proj
    _check_denominator(denom, 1.0, proj, tol=tol)
    c_a = complex(l_a(a_inv_w)) / denom
    return a_inv_w + c_a * a_inv_f, c_a


def _solve_2x2(m11, m12, m21, m22, r1, r2, tol, what):
    det = m11 * m22 - m12 * m21
    _check_denominator(det, m11 * m22, m12 * m21, tol=tol, what=what)
    c1 = (m22 * r1 - m12 * r2) / det
    c2 = (m11 * r2 - m21 * r1) / det
    return c1, c2, det


def solve_rank_two(base: Resolvent, f_a, l_a: Functional, f_b, l_b: Functional, w,
                   tol=SINGULAR_TOL):
    """Solve ``(A - f_a<l_a| - f_b<l_b|) v = w`` through a 2x2 coefficient system.

    Returns ``(v, c_a, c_b)`` with ``v = A^{-1}w + c_a A^{-1}f_a + c_b A^{-1}f_b``
    and ``c_a = <l_a|v>``, ``c_b = <l_b|v>``.
    """
    a_inv_w = base(w)
    a_inv_fa = base(f_a)
    a_inv_fb = base(f_b)
    m11 = 1.0 - complex(l_a(a_inv_fa))
    m12 = -complex(l_a(a_inv_fb))
    m21 = -complex(l_b(a_inv_fa))
    m22 = 1.0 - complex(l_b(a_inv_fb))
    r1 = complex(l_a(a_inv_w))
    r2 = complex(l_b(a_inv_w))
    c_a, c_b, _ = _solve_2x2(m11, m12, m21, m22, r1, r2, tol, "rank-two determinant")
    v = a_inv_w + c_a * a_inv_fa + c_b * a_inv_fb
    return v, c_a, c_b


@dataclass(frozen=True)
class BlockSolution:
    v1: Any
    v2: Any
    c1: complex
    c2: complex
    det: complex


def block_coefficients(base1, base2, f11, f12, f21, f22, l1, l2, w1, w2):
    """Images under the base resolvents and the entries of the 2x2 system.

    Returned as a dict so the model layer can reuse the pieces without
    re-applying the (possibly expensive) base resolvents.
    """
    img = {
        "w1": base1(w1), "f11": base1(f11), "f12": base1(f12),
        "w2": base2(w2), "f21": base2(f21), "f22": base2(f22),
    }
    m = {
        "m11": 1.0 - complex(l1(img["f11"])),
        "m12": -complex(l1(img["f12"])),
        "m21": -complex(l2(img["f21"])),
        "m22": 1.0 - complex(l2(img["f22"])),
        "r1": complex(l1(img["w1"])),
        "r2": complex(l2(img["w2"])),
    }
    return img, m


def solve_block(base1: Resolvent, base2: Resolvent, f11, f12, f21, f22,
                l1: Functional, l2: Functional, w1, w2, tol=SINGULAR_TOL) -> BlockSolution:
    """Solve the 2x2 block system with dyadic off-diagonal coupling.

    The operator is::

        [ A11 - f11<l1|      -f12<l2|   ]
        [   -f21<l1|      A22 - f22<l2| ]

    with ``A11`` acting on the first space and ``A22`` on the second.
    Raises :class:`SingularPerturbation` when the determinant of the 2x2
    coefficient system vanishes.
    """
    img, m = block_coefficients(base1, base2, f11, f12, f21, f22, l1, l2, w1, w2)
    c1, c2, det = _solve_2x2(m["m11"], m["m12"], m["m21"], m["m22"],
                             m["r1"], m["r2"], tol, "block determinant")
    v1 = img["w1"] + c1 * img["f11"] + c2 * img["f12"]
    v2 = img["w2"] + c1 * img["f21"] + c2 * img["f22"]
    return BlockSolution(v1, v2, c1, c2, det)


# -- dense oracle ---------------------------------------------------------

def _as_square(M, name="M"):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def dense_invert(M, cond_limit=COND_LIMIT, error=SingularMatrix):
    """Invert a dense square matrix by partial-pivot LU with safety guards.

    Raises ``error`` (``SingularMatrix`` by default) on a zero pivot, a pivot
    growth factor above ``GROWTH_LIMIT`` or a 1-norm condition estimate above
    ``cond_limit``.
    """
    M = _as_square(M)
    n = M.shape[0]
    if n == 0:
        return M.copy()
    scale = np.max(np.abs(M))
    if scale == 0:
        raise error("matrix is identically zero")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as ``error``
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    diag = np.abs(np.diag(lu))
    if np.min(diag) <= np.finfo(float).eps * scale * n:
        raise error("zero pivot encountered in LU factorization")
    growth = np.max(np.abs(np.triu(lu))) / scale
    if growth > GROWTH_LIMIT:
        raise error(f"pivot growth factor {growth:.3g} exceeds {GROWTH_LIMIT:g}")
    inv = scipy.linalg.lu_solve((lu, piv), np.eye(n, dtype=complex), check_finite=False)
    cond = np.linalg.norm(M, 1) * np.linalg.norm(inv, 1)
    if not np.isfinite(cond) or cond > cond_limit:
        raise error(f"condition estimate {cond:.3g} exceeds {cond_limit:g}")
    return inv


class FrobeniusVariant(enum.Enum):
    A_INVERTIBLE = "A"
    D_INVERTIBLE = "D"


def frobenius_invert(M, split: int, variant=FrobeniusVariant.A_INVERTIBLE):
    """Block inverse of ``M = [[A, B], [C, D]]`` via a Schur complement.

    ``split`` is the size of the leading block ``A``. With
    ``A_INVERTIBLE`` the complement ``D - C A^{-1} B`` is inverted,
    with ``D_INVERTIBLE`` the complement ``A - B D^{-1} C``.
    """
    M = _as_square(M)
    n = M.shape[0]
    if not 0 < split < n:
        raise ValueError(f"split must lie strictly between 0 and {n}, got {split}")
    variant = FrobeniusVariant(variant)
    A, B = M[:split, :split], M[:split, split:]
    C, D = M[split:, :split], M[split:, split:]

    if variant is FrobeniusVariant.A_INVERTIBLE:
        Ai = dense_invert(A, error=SingularBlock)
        S = dense_invert(D - C @ Ai @ B, error=SingularBlock)
        AiB = Ai @ B
        CAi = C @ Ai
        top = np.hstack([Ai + AiB @ S @ CAi, -AiB @ S])
        bottom = np.hstack([-S @ CAi, S])
    else:
        Di = dense_invert(D, error=SingularBlock)
        S = dense_invert(A - B @ Di @ C, error=SingularBlock)
        BDi = B @ Di
        DiC = Di @ C
        top = np.hstack([S, -S @ BDi])
        bottom = np.hstack([-DiC @ S, Di + DiC @ S @ BDi])
    return np.vstack([top, bottom])


def matrix_resolvent(A) -> Resolvent:
    """``w -> A^{-1} w`` for a dense matrix, factored once."""
    A = _as_square(A, "A")
    lu_piv = scipy.linalg.lu_factor(A, check_finite=False)

    def apply_inverse(w):
        return scipy.linalg.lu_solve(lu_piv, np.asarray(w, dtype=complex), check_finite=False)

    return apply_inverse


def row_functional(l) -> Functional:
    """The functional ``v -> l . v`` (plain bilinear, no conjugation)."""
    l = np.asarray(l, dtype=complex)
    return lambda v: complex(l @ np.asarray(v, dtype=complex))
