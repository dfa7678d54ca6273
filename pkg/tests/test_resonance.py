import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankres.branchkit import Sheet, SheetPoint, k_minus, k_plus, k_upper, on_cut
from rankres.errors import AtPole, DomainError
from rankres.models import CoupledParams, FriedrichsParams
from rankres.resonance import (RenormalizedParams, amplitude_squares_extended, amplitudes,
                               det_inv_extended, det_inv_upper, friedrichs_numerator,
                               friedrichs_poles, phase_shift, resonance_poles,
                               resonant_wavenumbers, second_sheet_poles, sheet_eval)
from rankres.selfcheck import sheet_divergence_ratios

mp.mp.dps = 40


def test_params():
    with pytest.raises(DomainError):
        RenormalizedParams(0, 0.1)
    with pytest.raises(DomainError):
        RenormalizedParams(1, -0.1)
    with pytest.raises(DomainError):
        RenormalizedParams(1, 0.1, -1)
    r = RenormalizedParams.from_coupled(CoupledParams(2.0, 0.8, 2.0), a_mp=3)
    assert (r.omega, r.gamma, r.a_mp) == (1.0, 0.2, 3.0)


def test_det_inv_examples():
    assert det_inv_extended(0, RenormalizedParams(1, 0)) == 1
    p = RenormalizedParams(1, 0.1)
    val = det_inv_extended(1, p)
    ref = -1 / (mp.mpf(1) + 2j * mp.mpf("0.1") - 1)
    assert val == pytest.approx(complex(ref), abs=1e-15)
    assert val == pytest.approx(5j, abs=1e-14)
    assert abs(val) ** 2 == pytest.approx(1 / ((1 - 1) ** 2 + (2 * 0.1) ** 2))
    with pytest.raises(AtPole) as exc:
        det_inv_extended(resonance_poles(p).poles[0], p)
    assert exc.value.pole is not None


def test_poles_examples():
    assert set(resonance_poles(RenormalizedParams(1, 0))) == {1, -1}
    p = RenormalizedParams(1, 0.1)
    r = float(mp.sqrt(mp.mpf("0.99")))
    poles = sorted(resonance_poles(p), key=lambda k: k.real)
    assert poles[0] == pytest.approx(complex(-r, -0.1), abs=1e-15)
    assert poles[1] == pytest.approx(complex(r, -0.1), abs=1e-15)
    for k in poles:
        assert abs(k * k + 0.2j * k - 1) < 1e-13
    over = RenormalizedParams(1, 2)
    s3 = float(mp.sqrt(3))
    poles = sorted(resonance_poles(over), key=lambda k: -k.imag)
    assert poles[0] == pytest.approx(-1j * (2 - s3), abs=1e-15)
    assert poles[1] == pytest.approx(-1j * (2 + s3), abs=1e-14)
    assert poles[0].imag == pytest.approx(-0.26794919243, abs=1e-10)


@settings(max_examples=300)
@given(st.floats(0.1, 10), st.floats(0, 2))
def test_poles_are_zeros_and_excluded(om, ratio):
    p = RenormalizedParams(om, ratio * om)
    ks = list(resonance_poles(p))
    assert len(ks) == 2
    for k in ks:
        assert abs(k * k + 2j * p.gamma * k - om * om) < 1e-12 * max(1, om * om)
        if p.gamma > 0:
            assert k.imag < 0
            if p.gamma > 1e-15:
                assert k.imag < -1e-15
        if om > p.gamma:
            assert k.imag == -p.gamma


def test_resonant_wavenumbers():
    r = resonant_wavenumbers(RenormalizedParams(1, 0))
    assert r.first == r.second == r.third == (1, -1)
    r = resonant_wavenumbers(RenormalizedParams(1, 0.1))
    assert r.first[0] == pytest.approx(0.98994949366, abs=1e-10)
    assert r.second == (1, -1)
    assert r.third[0] == pytest.approx(1.01015254455, abs=1e-10)
    r = resonant_wavenumbers(RenormalizedParams(1, 1))
    assert not r.first_exists and not r.third_exists and r.second == (1, -1)


def test_amplitude_examples():
    p = RenormalizedParams(1, 0.1, 1)
    a = amplitudes(1, p)
    assert (a.amp_q, a.amp_Q, a.amp_qQ) == pytest.approx((5, 0, 5), abs=1e-14)
    assert a.amp_Q == 0
    a0 = amplitudes(0, RenormalizedParams(2, 0.3, 1.7))
    assert (a0.amp_q, a0.amp_Q, a0.amp_qQ) == pytest.approx((1.7, 1.7, 0))
    with pytest.raises(AtPole):
        amplitudes(1, RenormalizedParams(1, 0))


@settings(max_examples=200)
@given(st.floats(0.1, 5), st.floats(0.01, 2), st.floats(0.1, 3), st.floats(-10, 10))
def test_amplitude_identities(om, ratio, amp, k):
    p = RenormalizedParams(om, ratio * om, amp)
    a = amplitudes(k, p)
    lhs = a.amp_q ** 2
    assert lhs == pytest.approx(om ** 4 * amp ** 2 * abs(det_inv_extended(k, p)) ** 2, rel=1e-12)
    energy = a.amp_Q ** 2 + (2 * p.gamma * k) ** 2 / om ** 4 * a.amp_q ** 2
    assert energy == pytest.approx(amp ** 2, rel=1e-12)
    # the real-k extension agrees with the real amplitudes
    ext = amplitude_squares_extended(k, p)
    assert ext[0].real == pytest.approx(lhs, rel=1e-12)
    assert ext[1].real == pytest.approx(a.amp_Q ** 2, rel=1e-12, abs=1e-14 * amp ** 2)


@settings(max_examples=200)
@given(st.floats(0.1, 5), st.floats(0.0, 2), st.floats(-8, 8), st.floats(-8, 8))
def test_product_form(om, ratio, kr, ki):
    p = RenormalizedParams(om, ratio * om, 1.3)
    k = complex(kr, ki)
    try:
        ext = amplitude_squares_extended(k, p)[0]
        prod = om ** 4 * p.a_mp ** 2 * det_inv_extended(k, p) * det_inv_extended(-k, p)
    except AtPole:
        return
    assert abs(ext - prod) <= 1e-12 * abs(ext) * 10


def test_phase_shift():
    p = RenormalizedParams(1.3, 0.2)
    assert phase_shift(0, p) == 0
    assert phase_shift(1.3, p) == pytest.approx(-math.pi / 2, abs=1e-15)
    far = [phase_shift(k, p) for k in (10.0, 100.0, 1e4)]
    assert all(abs(f) > math.pi / 2 for f in far)
    assert abs(far[-1]) > math.pi - 1e-3
    assert abs(far[0]) < abs(far[1]) < abs(far[2])
    assert -math.pi < phase_shift(-5.0, p) <= math.pi


def test_argmax_matches_closed_form():
    p = RenormalizedParams(1.0, 0.1)
    dk = 1e-4
    ks = dk * np.arange(1, 30001)
    aq = np.array([amplitudes(k, p).amp_q for k in ks[::1]])
    assert abs(ks[np.argmax(aq)] - resonant_wavenumbers(p).first[0]) <= dk


def test_restriction_consistency(rng):
    p = RenormalizedParams(1.2, 0.3)
    zs = rng.uniform(-10, 10, 1000) + 1j * rng.uniform(-10, 10, 1000)
    for z in zs:
        if on_cut(z):
            continue
        a = det_inv_upper(z, p)
        b = det_inv_extended(k_upper(z, 1.0), p)
        c = sheet_eval(SheetPoint(z, Sheet.FIRST), p)
        assert abs(a - b) <= 1e-14 * abs(a) and abs(a - c) <= 1e-14 * abs(a)


def test_sheet_eval_example():
    assert sheet_eval(SheetPoint(1, 1), RenormalizedParams(1, 0)) == pytest.approx(0.5)
    assert sheet_eval(SheetPoint(1, 2), RenormalizedParams(1, 0)) == pytest.approx(0.5)


@pytest.mark.parametrize("x", [-0.3, -2.0, -7.5])
def test_sheet_gluing(x):
    p = RenormalizedParams(1.1, 0.25)
    on_first = sheet_eval(SheetPoint(x, Sheet.FIRST), p)
    on_second = sheet_eval(SheetPoint(x, Sheet.SECOND), p)
    errs_above, errs_below = [], []
    for eps in (1e-3, 1e-5, 1e-7, 1e-9):
        above = sheet_eval(SheetPoint(complex(x, eps), Sheet.FIRST), p)
        below = sheet_eval(SheetPoint(complex(x, -eps), Sheet.FIRST), p)
        errs_above.append(abs(above - on_second))
        errs_below.append(abs(below - on_first))
    for errs in (errs_above, errs_below):
        assert errs[-1] < 1e-7
        assert all(a > b for a, b in zip(errs, errs[1:]))
    # the two boundary values differ, so the cut is a genuine discontinuity on sheet 1
    assert abs(on_first - on_second) > 1e-3


def test_second_sheet_poles():
    p = RenormalizedParams(1, 0.1)
    zs = second_sheet_poles(p)
    for z, k in zip(zs, resonance_poles(p)):
        assert k_minus(z) == pytest.approx(k, abs=1e-14)
        assert k_plus(z) != pytest.approx(k, abs=1e-3)
        with pytest.raises(AtPole):
            sheet_eval(SheetPoint(z, Sheet.SECOND), p)
        assert cmath.isfinite(sheet_eval(SheetPoint(z, Sheet.FIRST), p))
    for _, second, first in sheet_divergence_ratios(p):
        assert second > 100 and first < 10


def test_friedrichs_poles_factored():
    p = FriedrichsParams(1.5, 0.0, 2.0, c=1.5)
    poles = friedrichs_poles(p)
    assert len(poles) == 3
    assert sorted(round(k.real, 12) for k in poles) == [-1.0, 0.0, 1.0]
    assert all(abs(k.imag) < 1e-12 for k in poles)


@pytest.mark.parametrize("form", ["display", "system"])
def test_friedrichs_poles_cubic(form):
    p = FriedrichsParams(1.0, 1.0, 1.0)
    poles = list(friedrichs_poles(p, form))
    const = 1j if form == "display" else -2j
    ref = mp.polyroots([-1, 0, 1, const], maxsteps=200, extraprec=100)
    assert len(poles) == 3
    for r in ref:
        assert min(abs(complex(r) - k) for k in poles) < 1e-12
    for k in poles:
        assert abs(-k ** 3 + k + const) < 1e-12
        assert abs(friedrichs_numerator(k, p, form)) < 1e-12
