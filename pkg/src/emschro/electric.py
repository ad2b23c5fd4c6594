"""Eigenvalue asymptotics for the purely electric operator -d^2/dx^2 + a(x).

Requires A identically zero and a even (so the operator commutes with
x -> -x and the spectrum splits into sine and cosine sectors).  Write

    a(x) = ac[0] + sum_{m >= 1} ac[m] cos(m x).

For each k >= 1 the eigenvalue near k^2 is k^2 + ac[0] + lt where the shift
lt solves a two-stage fixed point: an explicit first-order corrector, then
Picard updates of the remaining correction in the orthogonal complement of
the unperturbed mode.  Leading order: lt = -ac[2k]/2 on the sine branch,
+ac[2k]/2 on the cosine branch, so the sector gap at k is ac[2k] + O(1/k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NoConvergence, SymmetryViolation
from .galerkin import SpectralDecomposition
from .potentials import AngularPotential, theta_grid

SYMMETRY_TOL = 1e-10


def even_cosine_coefficients(p: AngularPotential) -> np.ndarray:
    """Cosine-series coefficients of a; rejects magnetic or non-even input.

    Returns ac with ac[0] = mean(a) and ac[m] = 2 Re(hat a_m) for m >= 1.
    """
    scale = max(1.0, float(np.max(np.abs(p.a_coeffs))))
    if float(np.max(np.abs(p.A_coeffs))) > SYMMETRY_TOL * scale:
        raise SymmetryViolation("magnetic component must vanish identically")
    if float(np.max(np.abs(p.a_coeffs.imag))) > SYMMETRY_TOL * scale:
        raise SymmetryViolation("electric component must be even in theta")
    B = p.a_bandwidth
    ac = np.zeros(B + 1)
    ac[0] = p.a_mean
    for m in range(1, B + 1):
        ac[m] = 2.0 * float(p.a_coeffs[B + m].real)
    return ac


def splitting_prediction(p: AngularPotential, k: int) -> float:
    """First-order sector gap at index k: (cosine eigenvalue) - (sine eigenvalue)."""
    ac = even_cosine_coefficients(p)
    return float(ac[2 * k]) if 2 * k <= p.a_bandwidth else 0.0


def _ac_at(ac: np.ndarray, m: int) -> float:
    m = abs(m)
    return float(ac[m]) if m < ac.size else 0.0


def explicit_sine_corrector(ac: np.ndarray, k: int, J: int) -> np.ndarray:
    """Sine coefficients of the first-order correction to sin(kx)."""
    out = np.zeros(J + 1)
    for j in range(1, J + 1):
        if j == k:
            continue
        out[j] = (_ac_at(ac, j + k) - _ac_at(ac, j - k)) / (2.0 * (j - k) * (j + k))
    return out


def explicit_cosine_corrector(ac: np.ndarray, k: int, J: int) -> np.ndarray:
    """Cosine coefficients of the first-order correction to cos(kx)."""
    out = np.zeros(J + 1)
    out[0] = _ac_at(ac, k) / (2.0 * k * k)
    for j in range(1, J + 1):
        if j == k:
            continue
        out[j] = -(_ac_at(ac, j - k) + _ac_at(ac, j + k)) / (2.0 * (j - k) * (j + k))
    return out


# -- real-grid transforms restricted to one parity sector -----------------------


def _sine_samples(s: np.ndarray, n: int) -> np.ndarray:
    spec = np.zeros(n // 2 + 1, dtype=complex)
    spec[1:s.size] = -0.5j * n * s[1:]
    return np.fft.irfft(spec, n)


def _cosine_samples(c: np.ndarray, n: int) -> np.ndarray:
    spec = np.zeros(n // 2 + 1, dtype=complex)
    spec[0] = n * c[0]
    spec[1:c.size] = 0.5 * n * c[1:]
    return np.fft.irfft(spec, n)


def _sine_coeffs(samples: np.ndarray, J: int) -> np.ndarray:
    spec = np.fft.rfft(samples)
    out = np.zeros(J + 1)
    out[1:] = -2.0 * spec[1:J + 1].imag / samples.size
    return out


def _cosine_coeffs(samples: np.ndarray, J: int) -> np.ndarray:
    spec = np.fft.rfft(samples)
    out = np.zeros(J + 1)
    out[0] = spec[0].real / samples.size
    out[1:] = 2.0 * spec[1:J + 1].real / samples.size
    return out


@dataclass(frozen=True)
class ElectricEigenpair:
    k: int
    parity: str                  # "sine" or "cosine"
    lam: float
    lam_shift: float             # lam - k^2 - mean(a)
    first_order_shift: float     # -+ ac[2k] / 2
    iterations: int
    residual_sup: float
    grid_n: int
    coeffs: np.ndarray = field(repr=False)   # parity-sector coefficients, unit leading term
    samples: np.ndarray = field(repr=False)


def solve_pair(p: AngularPotential, k: int, parity: str,
               tol: float = 1e-12, max_iter: int = 200) -> ElectricEigenpair:
    """Eigenpair near k^2 + mean(a) in the chosen parity sector."""
    if parity not in ("sine", "cosine"):
        raise InvalidInput("parity must be 'sine' or 'cosine'")
    k = int(k)
    if k < 1:
        raise InvalidInput("index k must be a positive integer")
    ac = even_cosine_coefficients(p)
    band = p.a_bandwidth
    J = k + 20 * max(band, 1) + 40
    n = 1
    while n < max(256, 4 * (J + band + 1)):
        n *= 2
    x = theta_grid(n)
    a_samples = p.a_values(x).real
    atil = ac[0]
    a2k = _ac_at(ac, 2 * k)
    sign = -1.0 if parity == "sine" else 1.0
    to_samples = _sine_samples if parity == "sine" else _cosine_samples
    to_coeffs = _sine_coeffs if parity == "sine" else _cosine_coeffs

    lead = np.zeros(J + 1)
    lead[k] = 1.0
    lead_samples = to_samples(lead, n)
    if parity == "sine":
        phi_k = explicit_sine_corrector(ac, k, J)
    else:
        phi_k = explicit_cosine_corrector(ac, k, J)
    phi_k_samples = to_samples(phi_k, n)

    lt = sign * a2k / 2.0
    psi = np.zeros(J + 1)
    psi_samples = np.zeros(n)
    it = 0
    for it in range(1, max_iter + 1):
        corr = phi_k_samples + psi_samples
        # solvability: project the perturbation of the corrected mode back on the lead
        lt_new = sign * a2k / 2.0 + float(np.mean(a_samples * corr * lead_samples) * 2.0)
        # residual forcing in the complement, leading-term coefficient nearly cancels
        F = (lt_new - sign * a2k / 2.0) * lead_samples + (lt_new + atil - a_samples) * corr
        Fc = to_coeffs(F, J)
        psi_new = np.zeros(J + 1)
        for j in range(0 if parity == "cosine" else 1, J + 1):
            if j == k:
                continue
            if j == 0:
                psi_new[0] = -Fc[0] / (k * k)
            else:
                psi_new[j] = Fc[j] / ((j - k) * (j + k))
        change = max(abs(lt_new - lt), float(np.max(np.abs(psi_new - psi))))
        lt, psi = lt_new, psi_new
        psi_samples = to_samples(psi, n)
        if change <= tol:
            break
    else:
        raise NoConvergence(f"no contraction at k = {k} ({parity} sector)")

    coeffs = lead + phi_k + psi
    u = lead_samples + phi_k_samples + psi_samples
    lam = k * k + atil + lt
    residual = _operator_residual(coeffs, a_samples, lam, parity, n)
    return ElectricEigenpair(k=k, parity=parity, lam=float(lam), lam_shift=float(lt),
                             first_order_shift=sign * a2k / 2.0, iterations=it,
                             residual_sup=residual, grid_n=n, coeffs=coeffs, samples=u)


def _operator_residual(coeffs: np.ndarray, a_samples: np.ndarray, lam: float,
                       parity: str, n: int) -> float:
    """Sup norm of -u'' + a u - lam u, relative to sup |u|."""
    J = coeffs.size - 1
    j = np.arange(J + 1)
    to_samples = _sine_samples if parity == "sine" else _cosine_samples
    u = to_samples(coeffs, n)
    upp = to_samples(-(j ** 2) * coeffs, n)
    res = -upp + a_samples * u - lam * u
    return float(np.max(np.abs(res)) / np.max(np.abs(u)))


# -- comparison tables against a reference spectrum ------------------------------


@dataclass(frozen=True)
class SplittingRow:
    k: int
    lam_sine: float
    lam_cosine: float
    mu_sine: float
    mu_cosine: float
    splitting: float           # mu_cosine - mu_sine
    predicted_splitting: float
    splitting_error: float
    scaled_splitting_error: float    # k * |splitting - predicted|
    match_residual: float            # max |lam - mu| over the two branches
    scaled_match: float              # k * match_residual


@dataclass(frozen=True)
class SplittingTable:
    rows: list[SplittingRow]
    split_error_slope: float
    match_slope: float


def _nearest(values: np.ndarray, x: float) -> float:
    return float(values[int(np.argmin(np.abs(values - x)))])


def _loglog_slope(ks: np.ndarray, vals: np.ndarray) -> float:
    good = vals > 1e-300
    if np.sum(good) < 2:
        return 0.0
    A = np.vstack([np.log(ks[good]), np.ones(int(np.sum(good)))]).T
    sl, _ = np.linalg.lstsq(A, np.log(vals[good]), rcond=None)[0]
    return float(sl)


def splitting_table(p: AngularPotential, dec: SpectralDecomposition,
                    k_values) -> SplittingTable:
    """Sector gaps and fixed-point eigenvalues against reference eigenvalues."""
    mus = np.asarray(dec.eigenvalues, dtype=float)
    rows = []
    for k in k_values:
        es = solve_pair(p, k, "sine")
        ec = solve_pair(p, k, "cosine")
        mu_s = _nearest(mus, es.lam)
        mu_c = _nearest(mus, ec.lam)
        pred = splitting_prediction(p, k)
        split = mu_c - mu_s
        err = abs(split - pred)
        match = max(abs(es.lam - mu_s), abs(ec.lam - mu_c))
        rows.append(SplittingRow(
            k=int(k), lam_sine=es.lam, lam_cosine=ec.lam, mu_sine=mu_s, mu_cosine=mu_c,
            splitting=split, predicted_splitting=pred, splitting_error=err,
            scaled_splitting_error=k * err, match_residual=match, scaled_match=k * match,
        ))
    ks = np.array([r.k for r in rows], dtype=float)
    return SplittingTable(
        rows=rows,
        split_error_slope=_loglog_slope(ks, np.array([r.splitting_error for r in rows])),
        match_slope=_loglog_slope(ks, np.array([r.match_residual for r in rows])),
    )


@dataclass(frozen=True)
class HalfIntegerRow:
    j: int
    predicted: float           # mean(a) + (j - 1/2)^2
    mu_pair: tuple[float, float]
    residual: float            # worst gap to the prediction within the pair
    scaled_residual: float     # j * residual


@dataclass(frozen=True)
class HalfIntegerTable:
    rows: list[HalfIntegerRow]
    slope: float


def half_integer_table(p: AngularPotential, dec: SpectralDecomposition,
                       j_values) -> HalfIntegerTable:
    """Near-double eigenvalue pairs at half-integer reduced circulation.

    Expects |reduced circulation + 1/2| tiny; predictions are
    mean(a) + (j - 1/2)^2 with a two-element cluster at each j.
    """
    if abs(p.reduced_circulation + 0.5) > 1e-9:
        raise InvalidInput("half-integer table requires reduced circulation -1/2")
    mus = np.asarray(dec.eigenvalues, dtype=float)
    atil = p.a_mean
    rows = []
    for j in j_values:
        j = int(j)
        pred = atil + (j - 0.5) ** 2
        order = np.argsort(np.abs(mus - pred))
        pair = (float(mus[order[0]]), float(mus[order[1]]))
        resid = max(abs(pair[0] - pred), abs(pair[1] - pred))
        rows.append(HalfIntegerRow(j=j, predicted=pred, mu_pair=pair,
                                   residual=resid, scaled_residual=j * resid))
    js = np.array([r.j for r in rows], dtype=float)
    return HalfIntegerTable(
        rows=rows,
        slope=_loglog_slope(js, np.array([r.residual for r in rows])),
    )


def doubled_potential(p: AngularPotential) -> AngularPotential:
    """The potential 4 a(2 theta) with no magnetic part."""
    ac_in = p.a_coeffs
    B = p.a_bandwidth
    out = np.zeros(4 * B + 1, dtype=complex)
    for m in range(-B, B + 1):
        out[2 * B + 2 * m] = 4.0 * ac_in[B + m]
    return AngularPotential(out, np.zeros(1, dtype=complex))


def doubling_check(p: AngularPotential, M: int, count: int) -> float:
    """Spectral identity for even a: eigenvalues of -d^2 + 4 a(2 theta) equal
    4 times the union of the periodic and antiperiodic eigenvalues of -d^2 + a.

    Returns the worst absolute deviation over the first `count` eigenvalues,
    scaled by max(1, eigenvalue).
    """
    from .galerkin import compute_spectrum

    even_cosine_coefficients(p)   # validates symmetry assumptions
    p_half = AngularPotential(p.a_coeffs, np.array([0.5], dtype=complex))
    p_doubled = doubled_potential(p)
    per = compute_spectrum(p, M)
    anti = compute_spectrum(p_half, M)
    dbl = compute_spectrum(p_doubled, 2 * M)
    nmax = min(count, per.resolved_count, anti.resolved_count)
    union = 4.0 * np.sort(np.concatenate([
        per.eigenvalues[:nmax], anti.eigenvalues[:nmax]]))[:nmax]
    if dbl.resolved_count < nmax:
        nmax = dbl.resolved_count
    direct = np.asarray(dbl.eigenvalues[:nmax])
    union = union[:nmax]
    return float(np.max(np.abs(direct - union) / np.maximum(1.0, np.abs(union))))
