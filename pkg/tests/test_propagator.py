"""Representation-formula evolution: closed forms, invariances, oracles."""

import dataclasses

import numpy as np
import pytest

from emschro.errors import InsufficientResolution, InvalidInput, ResolutionError
from emschro.galerkin import compute_spectrum
from emschro.kernel import ab_eigendata, from_spectrum
from emschro.potentials import build_potential
from emschro.propagator import (
    PolarField,
    crank_nicolson_oracle,
    decay_profile,
    evolve,
    evolve_result,
    free_evolution,
    gaussian_ring,
    load_field,
    modal_coefficients,
    radial_bandwidth,
    relative_l2_difference,
    required_source_points,
    save_field,
)


def uniform_radii(r_max: float, n: int) -> np.ndarray:
    return (r_max / n) * np.arange(1, n + 1)


@pytest.fixture(scope="module")
def ring_m1():
    return gaussian_ring(5.0, 1.0, 2048, 12.0, n_theta=64, angular_mode=1)


@pytest.fixture(scope="module")
def data_ab():
    return ab_eigendata(0.3, 24)


def test_gaussian_ring_structure():
    u0 = gaussian_ring(5.0, 1.0, 256, 12.0, n_theta=32, angular_mode=2)
    assert u0.values.shape == (256, 32)
    assert u0.r.shape == (256,)
    assert u0.t == 0.0
    th = u0.thetas()
    radial = np.exp(-((u0.r - 5.0) ** 2))
    assert np.allclose(u0.values, np.outer(radial, np.exp(2j * th)), atol=1e-14)
    assert u0.sup_norm() == pytest.approx(np.max(radial), abs=1e-12)


def test_polar_field_validation():
    vals = np.zeros((8, 16), complex)
    with pytest.raises(InvalidInput):
        PolarField(np.array([0.1, 0.2, 0.4]), np.zeros((3, 8), complex), 0.0)
    with pytest.raises(InvalidInput):
        PolarField(uniform_radii(1.0, 4), vals, 0.0)


def test_norms_against_direct_quadrature():
    u0 = gaussian_ring(3.0, 0.7, 512, 8.0, n_theta=48)
    dr = u0.r[1] - u0.r[0]
    dth = 2 * np.pi / 48
    w = np.abs(u0.values) ** 2 * u0.r[:, None]
    assert u0.l2_norm() == pytest.approx(np.sqrt(np.sum(w) * dr * dth), rel=1e-12)
    assert u0.l1_norm() == pytest.approx(
        np.sum(np.abs(u0.values) * u0.r[:, None]) * dr * dth, rel=1e-12)


def test_snapshot_round_trip(tmp_path, ring_m1):
    path = tmp_path / "field.bin"
    moved = dataclasses.replace(ring_m1, t=1.25)
    save_field(str(path), moved)
    back = load_field(str(path))
    assert back.t == 1.25
    assert np.array_equal(back.r, moved.r)
    assert np.array_equal(back.values, moved.values)


def test_radial_bandwidth_of_ring(ring_m1):
    k = radial_bandwidth(ring_m1)
    assert 4.0 < k < 6.0  # unit-width Gaussian ring, measured 4.89


def test_modal_coefficients_pick_out_the_ring_mode(ring_m1, data_ab):
    coeffs = modal_coefficients(data_ab, ring_m1)
    norms = np.linalg.norm(coeffs, axis=1)
    top = int(np.argmax(norms))
    assert np.isclose(data_ab.beta[top], abs(1 + 0.3))
    others = np.delete(norms, top)
    assert np.max(others) < 1e-12 * norms[top]
    radial = np.exp(-((ring_m1.r - 5.0) ** 2))
    assert np.allclose(coeffs[top], np.sqrt(2 * np.pi) * radial, atol=1e-12)


def test_free_evolution_matches_gaussian_closed_form():
    a = 2.0
    n, r_max, t = 2048, 16.0, 0.5
    r = uniform_radii(r_max, n)
    u0 = PolarField(r, np.outer(np.exp(-((r / a) ** 2)),
                                np.ones(32, complex)), 0.0)
    out = free_evolution(u0, t, r_out=r)
    sigma = a * a + 4j * t
    exact = np.outer((a * a / sigma) * np.exp(-(r ** 2) / sigma),
                     np.ones(32, complex))
    err = np.linalg.norm(out.values - exact) / np.linalg.norm(exact)
    assert err < 1e-4


def test_free_evolution_matches_degree_one_closed_form():
    a = 2.0
    n, r_max, t = 2048, 16.0, 0.5
    r = uniform_radii(r_max, n)
    th = 2 * np.pi * np.arange(32) / 32
    u0 = PolarField(r, np.outer(r * np.exp(-((r / a) ** 2)), np.exp(1j * th)), 0.0)
    out = free_evolution(u0, t, r_out=r)
    sigma = a * a + 4j * t
    exact = np.outer((a * a / sigma) ** 2 * r * np.exp(-(r ** 2) / sigma),
                     np.exp(1j * th))
    err = np.linalg.norm(out.values - exact) / np.linalg.norm(exact)
    assert err < 1e-6


def test_evolve_at_time_zero_is_identity(ring_m1, data_ab):
    out = evolve(data_ab, ring_m1, 0.0)
    assert out.t == 0.0
    assert np.array_equal(out.values, ring_m1.values)


def test_zero_data_stays_zero(ring_m1, data_ab):
    zero = dataclasses.replace(ring_m1, values=np.zeros_like(ring_m1.values))
    out = evolve(data_ab, zero, 0.8)
    assert np.all(out.values == 0)


def test_round_trip_through_negative_time(ring_m1, data_ab):
    mid_grid = uniform_radii(26.0, 6144)
    mid = evolve(data_ab, ring_m1, 0.5, r_out=mid_grid)
    back = evolve(data_ab, mid, -0.5, r_out=ring_m1.r)
    num = np.linalg.norm(back.values - ring_m1.values)
    den = np.linalg.norm(ring_m1.values)
    assert num / den < 1e-6


def test_group_property(ring_m1, data_ab):
    mid_grid = uniform_radii(24.0, 4096)
    one = evolve(data_ab, ring_m1, 0.7, r_out=mid_grid)
    two = evolve(data_ab, one, 0.9, r_out=mid_grid)
    direct = evolve(data_ab, ring_m1, 1.6, r_out=mid_grid)
    err = relative_l2_difference(two, direct)
    assert err < 1e-8


def test_parabolic_scaling_covariance(ring_m1, data_ab):
    lam = 1.5
    t = 0.4
    r_mid = uniform_radii(20.0, 4096)
    base = evolve(data_ab, ring_m1, t, r_out=r_mid)
    scaled_u0 = PolarField(lam * ring_m1.r, ring_m1.values, 0.0)
    scaled = evolve(data_ab, scaled_u0, lam * lam * t, r_out=lam * r_mid)
    err = np.linalg.norm(scaled.values - base.values) / np.linalg.norm(base.values)
    assert err < 1e-10


def test_l2_norm_is_conserved(ring_m1, data_ab):
    res = evolve_result(data_ab, ring_m1, 0.5)
    assert res.l2_norm == pytest.approx(ring_m1.l2_norm(), rel=1e-8)
    assert res.decay_functional == pytest.approx(
        0.5 * res.sup_norm / ring_m1.l1_norm(), rel=1e-12)


def test_crank_nicolson_agrees_with_series(data_ab):
    u0 = gaussian_ring(5.0, 1.0, 1280, 12.0, n_theta=64, angular_mode=1)
    orc = crank_nicolson_oracle(data_ab, u0, 0.5)
    ev = evolve(data_ab, u0, 0.5, r_out=orc.r)
    assert relative_l2_difference(ev, orc) < 1e-3


def test_crank_nicolson_boundary_monitor(data_ab):
    u0 = gaussian_ring(5.0, 1.0, 640, 12.0, n_theta=32, angular_mode=1)
    with pytest.raises(ResolutionError) as exc:
        crank_nicolson_oracle(data_ab, u0, 2.0, r_max=10.0)
    assert exc.value.suggested_n > 0


def test_source_resolution_guard(data_ab):
    coarse = gaussian_ring(5.0, 1.0, 256, 12.0, n_theta=32, angular_mode=1)
    with pytest.raises(ResolutionError) as exc:
        evolve(data_ab, coarse, 0.05)
    assert exc.value.suggested_n > 256
    assert required_source_points(12.0, 30.0, 0.05) > required_source_points(
        12.0, 30.0, 0.5)


def test_angular_completeness_guard(ring_m1):
    tiny = ab_eigendata(0.3, 2)  # modes -2..2 cannot carry an m = 4 ring
    u4 = gaussian_ring(5.0, 1.0, 1024, 12.0, n_theta=32, angular_mode=4)
    with pytest.raises(InsufficientResolution):
        evolve(tiny, u4, 0.5)


def test_decay_profile_needs_three_decades(ring_m1, data_ab):
    with pytest.raises(InvalidInput):
        decay_profile(data_ab, ring_m1, [1.0, 2.0, 4.0])


def test_relative_difference_requires_matching_grids(ring_m1):
    other = gaussian_ring(5.0, 1.0, 1024, 12.0, n_theta=64, angular_mode=1)
    with pytest.raises(InvalidInput):
        relative_l2_difference(ring_m1, other)


def test_general_potential_evolution_against_stepper():
    p = build_potential(a_coeffs=[0.1, 0.0, 0.1], A_coeffs=[0.3])
    data = from_spectrum(compute_spectrum(p, 48))
    u0 = gaussian_ring(5.0, 1.0, 1280, 12.0, n_theta=64, angular_mode=0)
    orc = crank_nicolson_oracle(data, u0, 0.5)
    ev = evolve(data, u0, 0.5, r_out=orc.r)
    assert relative_l2_difference(ev, orc) < 1e-3
