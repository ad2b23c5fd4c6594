"""Bessel evaluation: frozen references, closed forms, bounds, recurrence."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emschro import bessel
from emschro.errors import InvalidInput, UnsupportedOrder

# frozen 25-digit references (50-digit working precision, rounded)
FROZEN = [
    (0.3, 1.0, 0.7402224792810204505291),
    (10.0, 5.0, 0.001467802647310474131108),
    (0.5, 3.0, 0.065008182877375778114),
    (2.7, 7.25, -0.2785783774653988902449),
    (35.5, 20.0, 2.958340875286361453977e-7),
    (120.0, 300.0, -0.04809117309217800243606),
]


@pytest.mark.parametrize("nu,r,ref", FROZEN)
def test_frozen_point_values(nu, r, ref):
    ev = bessel.bessel_j(nu, r)
    assert ev.value == pytest.approx(ref, rel=2e-12, abs=1e-15)
    assert abs(ev.value - ref) <= max(ev.est_abs_err, 5e-13)


def test_half_order_closed_form():
    r = np.linspace(0.2, 40.0, 300)
    exact = np.sqrt(2.0 / (np.pi * r)) * np.sin(r)
    assert np.allclose(bessel.j_grid(0.5, r), exact, atol=5e-13)


def test_grid_matches_scalar_route():
    r = np.linspace(0.0, 30.0, 97)
    for nu in (0.0, 0.3, 4.5, 17.0):
        grid = bessel.j_grid(nu, r)
        scalar = np.array([bessel.bessel_j(nu, x).value for x in r])
        assert np.allclose(grid, scalar, atol=2e-12, rtol=0.0)


def test_regime_switch_is_seamless():
    for nu in (0.3, 6.0, 28.0):
        cut = bessel.series_switch_radius(nu)
        r = np.linspace(cut - 0.5, cut + 0.5, 101)
        vals = bessel.j_grid(nu, r)
        jumps = np.abs(np.diff(vals))
        assert np.max(jumps) < 0.1  # no discontinuity at the route boundary
        from scipy.special import jv
        assert np.allclose(vals, jv(nu, r), atol=1e-11)


def test_order_and_argument_validation():
    with pytest.raises(UnsupportedOrder):
        bessel.bessel_j(-0.5, 1.0)
    with pytest.raises(UnsupportedOrder):
        bessel.bessel_j(float("nan"), 1.0)
    with pytest.raises(InvalidInput):
        bessel.bessel_j(0.5, -1.0)


def test_tail_bound_frozen_values():
    assert bessel.term_tail_bound(5.0, 2.0) == pytest.approx(1.0 / 120.0, rel=1e-12)
    assert bessel.term_tail_bound(10.5, 3.0) == pytest.approx(
        5.9351583981898346827e-6, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(0.0, 40.0), r=st.floats(0.0, 60.0))
def test_majorant_dominates(nu, r):
    val = bessel.bessel_j(nu, r).value
    log_bound = nu * math.log(r / 2.0) - math.lgamma(nu + 1.0) if r / 2.0 > 0 else (
        0.0 if nu == 0.0 else -math.inf)
    bound = math.exp(log_bound) if log_bound > -700 else 0.0
    assert abs(val) <= bound + 1e-12


@settings(max_examples=30, deadline=None)
@given(nu=st.floats(1.0, 30.0), r=st.floats(0.5, 50.0))
def test_three_term_recurrence(nu, r):
    lhs = bessel.bessel_j(nu - 1.0, r).value + bessel.bessel_j(nu + 1.0, r).value
    rhs = (2.0 * nu / r) * bessel.bessel_j(nu, r).value
    assert lhs == pytest.approx(rhs, abs=5e-9)


def test_uniform_order_bound_scan():
    rep = bessel.landau_bound_check(nu_max=80, n_r=600)
    assert rep.finite
    # the scaled sup nu^{1/3} max_r |J_nu(r)| has a universal ceiling
    assert 0.60 < rep.constant < 0.72
    assert rep.argmax_order <= 80
