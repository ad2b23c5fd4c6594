"""Truncated eigenproblem: exact flux-line case, invariances, clusters."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emschro.errors import InvalidInput
from emschro.galerkin import (
    cluster_check,
    compute_spectrum,
    spectrum_rows,
    subspace_angle,
)
from emschro.potentials import build_potential, constant_potential, theta_grid


@pytest.mark.parametrize("alpha", [0.3, -0.25, 0.5])
def test_flux_line_spectrum_is_exact(alpha):
    dec = compute_spectrum(constant_potential(0.0, alpha), 48)
    k = np.arange(-48, 49)
    assert np.allclose(np.sort(dec.eigenvalues), np.sort((k + alpha) ** 2),
                       atol=1e-11)
    mags = np.abs(dec.coeffs)
    assert np.allclose(np.max(mags, axis=0), 1.0, atol=1e-12)
    assert np.max(np.partition(mags, -2, axis=0)[-2, :]) < 1e-12


def test_eigenvalues_sorted_real_and_certified(dec_cos64):
    w = dec_cos64.eigenvalues
    assert np.all(np.diff(w) >= 0)
    assert w.dtype == np.float64
    assert 0 < dec_cos64.resolved_count <= w.size
    assert dec_cos64.hermitian_defect < 1e-12


def test_ground_state_frozen_value(dec_cos64):
    # a = cos(theta), A = 0.3 has a slightly negative ground eigenvalue
    assert dec_cos64.eigenvalues[0] == pytest.approx(-0.35890355745735536, abs=1e-9)


def test_spectral_shift_by_constant(p_cos):
    shifted = build_potential(a_coeffs=[0.5, 0.7, 0.5], A_coeffs=[0.3])
    d0 = compute_spectrum(p_cos, 32)
    d1 = compute_spectrum(shifted, 32)
    assert np.allclose(d1.eigenvalues - d0.eigenvalues, 0.7, atol=1e-10)


def test_integer_circulation_shift_preserves_spectrum(p_cos):
    p_shift = build_potential(a_coeffs=[0.5, 0.0, 0.5], A_coeffs=[1.3])
    d0 = compute_spectrum(p_cos, 48)
    d1 = compute_spectrum(p_shift, 48)
    n = min(d0.resolved_count, d1.resolved_count)
    assert np.allclose(d0.eigenvalues[:n], d1.eigenvalues[:n], atol=1e-9)


def test_eigenfunctions_orthonormal(dec_cos64):
    n = 512
    psi = dec_cos64.eigenfunctions_on_grid(n)[:, :20]
    gram = (2 * np.pi / n) * psi.conj().T @ psi
    assert np.allclose(gram, np.eye(20), atol=1e-10)


def test_eigenfunction_satisfies_operator(dec_cos64, p_cos):
    """Apply the angular operator pseudo-spectrally to the fifth eigenfunction."""
    n = 1024
    th = theta_grid(n)
    k = np.fft.fftfreq(n, d=1.0 / n)
    psi = dec_cos64.eigenfunctions_on_grid(n)[:, 5]
    mu = dec_cos64.eigenvalues[5]
    a = p_cos.a_values(th)
    A = p_cos.A_values(th)
    ph = np.fft.fft(psi)
    d1 = np.fft.ifft(1j * k * ph)
    d2 = np.fft.ifft(-(k ** 2) * ph)
    Lpsi = -d2 + (a + A ** 2) * psi - 2j * A * d1  # A' = 0 for constant A
    assert np.max(np.abs(Lpsi - mu * psi)) < 1e-8


def test_spectrum_rows_shape(dec_cos64):
    rows = list(spectrum_rows(dec_cos64))
    assert len(rows) == dec_cos64.eigenvalues.size
    ks, mus = zip(*rows)
    assert list(mus) == sorted(mus)


def test_cluster_check_two_per_ball(dec_cos64, p_cos):
    rep = cluster_check(dec_cos64, p_cos, 10, 28)
    assert rep.passed and rep.disjoint
    assert all(r.count == 2 for r in rep.rows)
    assert rep.smallest_c >= 0.0


def test_cluster_check_validates_range(dec_cos64, p_cos):
    with pytest.raises(InvalidInput):
        cluster_check(dec_cos64, p_cos, 10, 10)
    with pytest.raises(InvalidInput):
        cluster_check(dec_cos64, p_cos, 0, 12)


def test_subspace_angle_extremes(rng):
    v = rng.standard_normal((8, 1)) + 1j * rng.standard_normal((8, 1))
    assert subspace_angle(v, 2.0j * v) == pytest.approx(0.0, abs=1e-6)
    e1 = np.zeros((8, 1), complex)
    e2 = np.zeros((8, 1), complex)
    e1[0, 0] = 1.0
    e2[3, 0] = 1.0
    assert subspace_angle(e1, e2) == pytest.approx(np.pi / 2, abs=1e-12)


def test_truncation_validation(p_cos):
    with pytest.raises(InvalidInput):
        compute_spectrum(p_cos, 0)


@settings(max_examples=10, deadline=None)
@given(c=st.floats(-2.0, 2.0))
def test_shift_property_random_constant(c):
    base = build_potential(a_coeffs=[0.25, 0.0, 0.25], A_coeffs=[0.2])
    moved = build_potential(a_coeffs=[0.25, c, 0.25], A_coeffs=[0.2])
    d0 = compute_spectrum(base, 16)
    d1 = compute_spectrum(moved, 16)
    assert np.allclose(d1.eigenvalues - d0.eigenvalues, c, atol=1e-10)
