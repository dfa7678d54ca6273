"""Finite-difference discretisation of the coupled block operators.

Independent of the Green's-function route: the field is put on a uniform
grid through ``x0`` with the 3-point Laplacian, the point mass at ``x0``
becomes ``1/h`` on that node, and both ends carry the outgoing closure
``du/dn = i k u``. The resulting sparse system is solved directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .branchkit import k_upper
from .green1d import FieldSpec, PointSource
from .models import CoupledParams, FriedrichsParams


@dataclass(frozen=True)
class GridSolution:
    q: complex
    x: np.ndarray
    u: np.ndarray
    h: float

    def at(self, x):
        """Field value at a grid node (nearest node, so pass node coordinates)."""
        idx = np.rint((np.asarray(x, dtype=float) - self.x[0]) / self.h).astype(int)
        return self.u[idx]


def default_half_width(z, c):
    """``20 / Im k`` capped at ``1e4``."""
    return min(20.0 / k_upper(z, c).imag, 1e4)


def fd_block_solve(z, w1, w2: FieldSpec, omega, a12, b21, b22, c, x0, h, half_width=None):
    """Solve the discretised block system::

        (z + omega**2) q - a12 u(x0)                           = w1
        z u - c**2 u'' - delta_x0 (b21 q + b22 u(x0))          = w2

    The coupled model is ``a12 = omega**2, b21 = 4 gamma_c, b22 = -4 gamma_c``;
    the Friedrichs variant ``a12 = gamma1, b21 = 4 gamma2c, b22 = 0``.
    Point sources in ``w2`` are deposited on their nearest node.
    """
    z = complex(z)
    k = k_upper(z, c)
    L = default_half_width(z, c) if half_width is None else float(half_width)
    m = int(math.ceil(L / h))
    n = 2 * m + 1
    x = x0 + h * np.arange(-m, m + 1)
    c2h2 = c * c / (h * h)

    main = np.full(n, z + 2 * c2h2, dtype=complex)
    upper = np.full(n - 1, -c2h2, dtype=complex)
    lower = np.full(n - 1, -c2h2, dtype=complex)
    # ghost nodes from (u[1] - u[-1]) / 2h = -ik u[0] and its mirror on the right
    upper[0] = -2 * c2h2
    lower[-1] = -2 * c2h2
    main[0] -= 2j * k * h * c2h2
    main[-1] -= 2j * k * h * c2h2
    field_block = sp.diags([lower, main, upper], [-1, 0, 1], format="lil", dtype=complex)
    field_block[m, m] -= b22 / h

    A = sp.lil_matrix((n + 1, n + 1), dtype=complex)
    A[0, 0] = z + omega ** 2
    A[0, 1 + m] = -a12
    A[1 + m, 0] = -b21 / h
    A[1:, 1:] = field_block

    rhs = np.zeros(n + 1, dtype=complex)
    rhs[0] = w1
    rhs[1:] = w2.value(x)
    for t in w2.terms:
        if isinstance(t, PointSource):
            j = int(np.clip(np.rint((t.at - x[0]) / h), 0, n - 1))
            rhs[1 + j] += t.amp / h

    sol = spla.spsolve(A.tocsc(), rhs)
    return GridSolution(q=complex(sol[0]), x=x, u=sol[1:], h=h)


def fd_solve_coupled(z, w1, w2, p: CoupledParams, h, half_width=None):
    g4 = 4 * p.gamma_c
    return fd_block_solve(z, w1, w2, p.omega, p.omega ** 2, g4, -g4, p.c, p.x0, h, half_width)


def fd_solve_friedrichs(z, w1, w2, p: FriedrichsParams, h, half_width=None):
    return fd_block_solve(z, w1, w2, p.omega, p.gamma1, 4 * p.gamma2c, 0.0, p.c, p.x0, h,
                          half_width)


def second_difference_residual(func, z, c, x, h):
    """``z u(x) - c**2 (u(x+h) - 2u(x) + u(x-h)) / h**2`` for a callable ``u``."""
    u0 = func(x)
    return z * u0 - c * c * (func(x + h) - 2 * u0 + func(x - h)) / (h * h)


def fourth_order_residual(func, z, c, x, h):
    """Same as :func:`second_difference_residual` with the 5-point O(h**4) stencil."""
    d2 = (-func(x + 2 * h) + 16 * func(x + h) - 30 * func(x) + 16 * func(x - h)
          - func(x - 2 * h)) / (12 * h * h)
    return z * func(x) - c * c * d2
