"""Reduced-size invariant suite behind ``rankres selfcheck``.

Each check draws its own seeded sample, compares the library against an
independent route (dense LU, finite differences, closed forms) and returns a
:class:`CheckResult`. ``tol_scale`` multiplies every tolerance; the CLI uses
it as a negative control.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass

import numpy as np

from . import finiterank as fr
from .branchkit import Sheet, SheetPoint, k_minus, k_plus, k_upper
from .errors import RankResError
from .green1d import FieldSpec, Gaussian, PointSource, QuadratureConfig, green_apply
from .models import (
    CoupledParams, FriedrichsParams, solve_coupled, solve_coupled_via_rank_one,
    solve_friedrichs,
)
from .oracles import fd_solve_coupled, fd_solve_friedrichs, second_difference_residual
from .resonance import (
    RenormalizedParams, amplitude_squares_extended, amplitudes, det_inv_extended,
    resonance_poles, resonant_wavenumbers, sheet_eval,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def _crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _well_conditioned(rng, n):
    return _crandn(rng, n, n) + 2 * math.sqrt(n) * np.eye(n)


def check_branch_maps(n=200, tol_scale=1.0, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    for _ in range(n):
        z = complex(*rng.uniform(-10, 10, 2))
        c = rng.uniform(0.2, 5)
        k = k_upper(z, c)
        worst = max(worst, abs(k * k * c * c + z) / abs(z))
        ok &= k.imag > 0 and k_minus(z, c) == -k_plus(z, c)
        kk = complex(rng.uniform(-3, 3), rng.uniform(0.1, 3))
        worst = max(worst, abs(k_upper(-kk * kk * c * c, c) - kk) / abs(kk))
    ok &= worst < 1e-14 * tol_scale
    return CheckResult("branch maps", bool(ok), f"max rel err {worst:.2e}")


def check_rank_one_oracle(n=200, tol_scale=1.0, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(1, 17))
        A = _well_conditioned(rng, d)
        f, l, w = _crandn(rng, d), _crandn(rng, d) / d, _crandn(rng, d)
        try:
            v, _ = fr.solve_rank_one(fr.matrix_resolvent(A), f, fr.row_functional(l), w)
            ref = fr.dense_invert(A - np.outer(f, l), cond_limit=1e6) @ w
        except RankResError:
            continue
        worst = max(worst, _rel(v, ref))
    return CheckResult("rank-one oracle", worst < 1e-10 * tol_scale, f"max rel err {worst:.2e}")


def check_rank_two_and_block(n=100, tol_scale=1.0, seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(2, 9))
        A = _well_conditioned(rng, d)
        fa, fb, la, lb, w = (_crandn(rng, d) for _ in range(5))
        la, lb = la / d, lb / d
        d1, d2 = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        A11, A22 = _well_conditioned(rng, d1), _well_conditioned(rng, d2)
        f11, f12, l1, w1 = (_crandn(rng, d1) for _ in range(4))
        f21, f22, l2, w2 = (_crandn(rng, d2) for _ in range(4))
        l1, l2 = l1 / d1, l2 / d2
        M = np.block([[A11 - np.outer(f11, l1), -np.outer(f12, l2)],
                      [-np.outer(f21, l1), A22 - np.outer(f22, l2)]])
        try:
            v, _, _ = fr.solve_rank_two(fr.matrix_resolvent(A), fa, fr.row_functional(la),
                                        fb, fr.row_functional(lb), w)
            ref = fr.dense_invert(A - np.outer(fa, la) - np.outer(fb, lb), cond_limit=1e6) @ w
            sol = fr.solve_block(fr.matrix_resolvent(A11), fr.matrix_resolvent(A22),
                                 f11, f12, f21, f22, fr.row_functional(l1),
                                 fr.row_functional(l2), w1, w2)
            ref_b = fr.dense_invert(M, cond_limit=1e6) @ np.concatenate([w1, w2])
        except RankResError:
            continue
        worst = max(worst, _rel(v, ref), _rel(np.concatenate([sol.v1, sol.v2]), ref_b))
    return CheckResult("rank-two/block oracle", worst < 1e-10 * tol_scale,
                       f"max rel err {worst:.2e}")


def check_frobenius(n=50, tol_scale=1.0, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(2, 11))
        M = _well_conditioned(rng, d)
        split = int(rng.integers(1, d))
        ref = fr.dense_invert(M)
        for variant in fr.FrobeniusVariant:
            worst = max(worst, _rel(fr.frobenius_invert(M, split, variant), ref))
    return CheckResult("frobenius formulas", worst < 1e-10 * tol_scale, f"max rel err {worst:.2e}")


def green_residual_orders(z=1.0 + 0.5j, c=1.3, hs=(0.2, 0.1, 0.05), xs=(-1.0, 0.3, 1.7)):
    """Observed convergence orders of the discrete ``z - c**2 d^2/dx^2`` residual."""
    field = FieldSpec((Gaussian(1.0, 0.0, 0.6), Gaussian(0.5 - 0.3j, 1.0, 0.4)))
    quad = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15)
    errs = []
    for h in hs:
        e = 0.0
        for x in xs:
            res = second_difference_residual(lambda t: green_apply(z, c, t, field, quad),
                                             z, c, x, h)
            e = max(e, abs(res - field.value(x)))
        errs.append(e)
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    return errs, orders


def check_green_residual(tol_scale=1.0):
    errs, orders = green_residual_orders()
    ok = min(orders) >= 1.8 / tol_scale
    return CheckResult("green residual", bool(ok),
                       "orders " + ", ".join(f"{o:.3f}" for o in orders))


def check_poles(n=100, tol_scale=1.0, seed=4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    excl = True
    for _ in range(n):
        om = rng.uniform(0.1, 10)
        p = RenormalizedParams(om, rng.uniform(0, 2 * om))
        for k in resonance_poles(p):
            worst = max(worst, abs(k * k + 2j * p.gamma * k - p.omega ** 2))
            if p.gamma > 0:
                excl &= k.imag < -1e-15
    ok = worst < 1e-12 * tol_scale and excl
    return CheckResult("determinant zeros / pole exclusion", bool(ok),
                       f"max |denominator| {worst:.2e}")


def check_amplitude_identities(n=300, tol_scale=1.0, seed=5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    refl = 0.0
    for _ in range(n):
        om = rng.uniform(0.1, 5)
        p = RenormalizedParams(om, rng.uniform(0.01, 2 * om), rng.uniform(0.1, 3))
        k = rng.uniform(-4 * om, 4 * om)
        a = amplitudes(k, p)
        lhs = a.amp_q ** 2
        worst = max(worst, abs(lhs - om ** 4 * p.a_mp ** 2 * abs(det_inv_extended(k, p)) ** 2) / lhs)
        energy = a.amp_Q ** 2 + (2 * p.gamma * k) ** 2 / om ** 4 * a.amp_q ** 2
        worst = max(worst, abs(energy - p.a_mp ** 2) / p.a_mp ** 2)
        kc = complex(*rng.uniform(-3 * om, 3 * om, 2))
        ext = amplitude_squares_extended(kc, p)[0]
        prod = om ** 4 * p.a_mp ** 2 * det_inv_extended(kc, p) * det_inv_extended(-kc, p)
        worst = max(worst, abs(ext - prod) / abs(ext))
        refl = max(refl, abs(amplitudes(om, p).amp_Q))
    ok = worst < 1e-12 * tol_scale and refl <= 1e-14 * tol_scale
    return CheckResult("amplitude identities", bool(ok),
                       f"max rel err {worst:.2e}, |amp_Q(omega)| {refl:.1e}")


def check_argmax(n=5, tol_scale=1.0, seed=6):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        om = rng.uniform(0.5, 3)
        g = rng.uniform(0.02, 0.5) * om
        p = RenormalizedParams(om, g)
        dk = 1e-4 * om
        ks = dk * np.arange(1, 30001)
        root = np.hypot(om ** 2 - ks ** 2, 2 * g * ks)
        res = resonant_wavenumbers(p)
        worst = max(worst, abs(ks[np.argmax(om ** 2 / root)] - res.first[0]) / dk,
                    abs(ks[np.argmax(ks ** 2 / root)] - res.third[0]) / dk)
    return CheckResult("amplitude argmax", worst <= 1.0 * tol_scale,
                       f"max offset {worst:.3f} grid steps")


def _random_coupled_case(rng):
    p = CoupledParams(rng.uniform(0.3, 3), rng.uniform(0.05, 1.5), rng.uniform(0.5, 2),
                      rng.uniform(-1, 1))
    z = complex(rng.uniform(0.1, 4), rng.uniform(-3, 3))
    w2 = FieldSpec((Gaussian(complex(*rng.normal(size=2)), p.x0 + rng.uniform(-1, 1),
                             rng.uniform(0.3, 1)),
                    PointSource(complex(*rng.normal(size=2)), p.x0 + rng.uniform(-1, 1))))
    return z, complex(*rng.normal(size=2)), w2, p


def check_cross_path(n=10, tol_scale=1.0, seed=7):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        z, w1, w2, p = _random_coupled_case(rng)
        a = solve_coupled(z, w1, w2, p)
        b = solve_coupled_via_rank_one(z, w1, w2, p)
        xs = p.x0 + np.array([-1.5, -0.2, 0.4, 2.0])
        va = [a.q, a.c1, a.c2] + [a.u_at(x) for x in xs]
        vb = [b.q, b.c1, b.c2] + [b.u_at(x) for x in xs]
        worst = max(worst, _rel(va, vb))
    return CheckResult("cross-path consistency", worst < 1e-10 * tol_scale,
                       f"max rel err {worst:.2e}")


def model_fd_errors(solver, fd_solver, z, w1, w2, p, hs=(0.04, 0.02, 0.01), xs=None):
    """Max deviation between closed form and grid solution at each refinement level."""
    sol = solver(z, w1, w2, p)
    xs = p.x0 + np.array([-1.2, 0.0, 0.8, 2.0]) if xs is None else np.asarray(xs)
    exact = np.array([sol.u_at(x) for x in xs])
    errs = []
    for h in hs:
        g = fd_solver(z, w1, w2, p, h)
        errs.append(max(abs(g.q - sol.q), float(np.max(np.abs(g.at(xs) - exact)))))
    return errs


def check_model_fd(tol_scale=1.0):
    w2 = FieldSpec((Gaussian(1.0, 0.5, 0.5), PointSource(0.3, 0.0)))
    e1 = model_fd_errors(solve_coupled, fd_solve_coupled, 1 + 0.5j, 0.4, w2,
                         CoupledParams(2.0, 0.5, 1.0, 0.0))
    e2 = model_fd_errors(solve_friedrichs, fd_solve_friedrichs, 1 + 1j, 0.4, w2,
                         FriedrichsParams(1.5, 0.7 + 0.2j, 0.4, 1.0, 0.0))
    ok = all(a > b for e in (e1, e2) for a, b in zip(e, e[1:]))
    ok &= max(e1[-1], e2[-1]) < 1e-4 * tol_scale
    return CheckResult("model finite-difference oracle", bool(ok),
                       f"coupled {e1[-1]:.1e}, friedrichs {e2[-1]:.1e} at finest grid")


def sheet_divergence_ratios(p, r_small=1e-3, r_large=1e-1, n_angles=64):
    """Lower-envelope ratio on sheet 2, upper-envelope ratio on sheet 1, per pole."""
    thetas = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    out = []
    for z_res in [-(k * k) for k in resonance_poles(p)]:
        def ring(r, sheet):
            return np.array([abs(sheet_eval(SheetPoint(z_res + r * cmath.exp(1j * t), sheet), p))
                             for t in thetas])
        second = ring(r_small, Sheet.SECOND).min() / ring(r_large, Sheet.SECOND).min()
        first = ring(r_small, Sheet.FIRST).max() / ring(r_large, Sheet.FIRST).max()
        out.append((z_res, second, first))
    return out


def check_sheets(tol_scale=1.0):
    p = RenormalizedParams(1.0, 0.1)
    ratios = sheet_divergence_ratios(p)
    ok = all(s > 100 / tol_scale and f < 10 for _, s, f in ratios)
    return CheckResult("second-sheet poles", bool(ok),
                       ", ".join(f"sheet2 {s:.2f} / sheet1 {f:.2f}" for _, s, f in ratios))


CHECKS = (
    check_branch_maps, check_rank_one_oracle, check_rank_two_and_block, check_frobenius,
    check_green_residual, check_poles, check_amplitude_identities, check_argmax,
    check_cross_path, check_model_fd, check_sheets,
)


def run_all(tol_scale=1.0, stream=None):
    """Run every check; returns the list of results and prints one line each."""
    results = []
    for check in CHECKS:
        t0 = time.perf_counter()
        try:
            res = check(tol_scale=tol_scale)
        except Exception as exc:  # a crash counts as a failure of that family
            res = CheckResult(check.__name__, False, f"raised {type(exc).__name__}: {exc}")
        results.append(res)
        if stream is not None:
            status = "PASS" if res.passed else "FAIL"
            print(f"{status}  {res.name:<34} {res.detail}  ({time.perf_counter() - t0:.2f}s)",
                  file=stream)
    return results
