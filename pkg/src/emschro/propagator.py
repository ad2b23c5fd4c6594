"""Time evolution through the Bessel-series representation, plus oracles.

For t > 0 the flow applied to u0 is evaluated modewise: expand u0 over the
angular eigenbasis, u0(r', theta') = sum_k a_k(r') psi_k(theta'), then

    u(r, theta, t) = (e^{i r^2/4t} / 2it) sum_k i^{-beta_k} psi_k(theta)
                     int_0^inf J_{beta_k}(r r'/2t) e^{i r'^2/4t} a_k(r') r' dr'.

Evaluation runs in the variable s = r/(2t): the radial integral is band-limited
in s by the source support, so a uniform s grid with spacing pi/(4 r'_max) is
spectrally adequate, and the L^2 norm follows from the same samples.  Negative
times use conjugation: flipping the sign of the magnetic field conjugates the
angular eigenbasis, so u(-t; A) = conj(u(t; -A) applied to conj(u0)).

Two independent oracles share only the angular diagonalization: a modewise
radial Crank-Nicolson integrator (Liouville form, unitary in ell^2), and the
closed-form free evolution for comparison experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from . import bessel, kernel
from .errors import InsufficientResolution, InvalidInput, ResolutionError
from .galerkin import compute_spectrum
from .kernel import KernelEigendata
from .potentials import AngularPotential, theta_grid

MODE_KEEP_RTOL = 1e-12
ANGULAR_DEFECT_TOL = 1e-6    # smallest detectable out-of-basis L2 fraction (sqrt eps floor)
S_OVERSAMPLE = 4.0           # s spacing = pi / (S_OVERSAMPLE * r'_max)
SRC_SAMPLES_PER_PERIOD = 16  # source grid rule vs fastest integrand oscillation


@dataclass(frozen=True)
class PolarField:
    """Complex field sampled on a polar product grid (uniform angles)."""
    r: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)   # shape (n_r, n_theta)
    t: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if r.ndim != 1 or v.ndim != 2 or v.shape[0] != r.size:
            raise InvalidInput("values must be (n_r, n_theta) matching the radial grid")
        if r.size > 2:
            steps = np.diff(r)
            if np.max(steps) - np.min(steps) > 1e-9 * np.max(steps):
                raise InvalidInput("radial grid must be uniformly spaced")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", v)

    @property
    def n_theta(self) -> int:
        return self.values.shape[1]

    def thetas(self) -> np.ndarray:
        return theta_grid(self.n_theta)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _weights(self) -> tuple[float, float]:
        dr = float(self.r[1] - self.r[0]) if self.r.size > 1 else 1.0
        return dr, 2.0 * math.pi / self.n_theta

    def l1_norm(self) -> float:
        dr, dth = self._weights()
        return float(np.sum(np.abs(self.values) * self.r[:, None]) * dr * dth)

    def l2_norm(self) -> float:
        dr, dth = self._weights()
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2 * self.r[:, None]) * dr * dth))


def gaussian_ring(r0: float, w: float, n_r: int, r_max: float,
                  n_theta: int = 64, angular_mode: int = 0) -> PolarField:
    """Ring exp(-(r - r0)^2 / w^2) e^{i m theta} on a uniform polar grid."""
    if r_max <= r0 or w <= 0:
        raise InvalidInput("need r_max > r0 and w > 0")
    dr = r_max / n_r
    r = dr * np.arange(1, n_r + 1)
    th = theta_grid(n_theta)
    radial = np.exp(-((r - r0) / w) ** 2)
    return PolarField(r=r, values=np.outer(radial, np.exp(1j * angular_mode * th)))


def radial_bandwidth(u0: PolarField, floor_fraction: float = 1e-6) -> float:
    """Largest local radial frequency |d_r u| / |u| where the field has amplitude.

    Bounds how fast the field spreads radially (group velocity 2 k_rad); used
    to size evaluation windows and the Crank-Nicolson step count.  Regions
    below floor_fraction of the sup are ignored so decaying tails do not count
    as oscillation.
    """
    v = np.asarray(u0.values)
    if v.shape[0] < 3:
        return 0.0
    mag = np.abs(v)
    sup = float(mag.max())
    if sup == 0.0:
        return 0.0
    dr = float(u0.r[1] - u0.r[0])
    grad = np.gradient(v, dr, axis=0)
    mask = mag >= floor_fraction * sup
    k_loc = (np.abs(grad[mask]) / mag[mask]).ravel()
    weight = (mag[mask] ** 2 * np.broadcast_to(u0.r[:, None], mag.shape)[mask]).ravel()
    order = np.argsort(k_loc)
    cum = np.cumsum(weight[order])
    idx = int(np.searchsorted(cum, (1.0 - 1e-6) * cum[-1]))
    return float(k_loc[order[min(idx, k_loc.size - 1)]])


def modal_coefficients(data: KernelEigendata, u0: PolarField) -> np.ndarray:
    """Coefficients a_k(r) of u0 against the angular eigenbasis; (n_modes, n_r)."""
    Psi = data.psi_values(u0.thetas())
    return (2.0 * math.pi / u0.n_theta) * (u0.values @ np.conj(Psi.T)).T


def _retained_modes(data: KernelEigendata, a: np.ndarray, u0: PolarField) -> np.ndarray:
    r = u0.r
    dr = float(r[1] - r[0])
    norms = np.sqrt(np.sum(np.abs(a) ** 2 * r[None, :], axis=1) * dr)
    top = float(np.max(norms))
    if top == 0.0:
        return np.empty(0, dtype=int)
    keep = np.flatnonzero(norms > MODE_KEEP_RTOL * top)
    if np.any(keep >= data.count - 2):
        raise InsufficientResolution(
            "initial data excites the top of the computed eigenbasis; "
            "recompute the spectrum with a larger basis"
        )
    # angular content outside the eigenbasis span must not be dropped silently
    total = u0.l2_norm()
    captured_sq = float(np.sum(norms ** 2))
    defect_sq = max(total ** 2 - captured_sq, 0.0)
    if math.sqrt(defect_sq) > ANGULAR_DEFECT_TOL * total:
        raise InsufficientResolution(
            "initial data has angular content outside the resolved eigenbasis"
        )
    return keep


def required_source_points(r_max: float, s_max: float, t: float) -> int:
    """Minimum radial samples for the source under the oscillation rule."""
    rate = s_max + r_max / (2.0 * abs(t))
    dr_needed = 2.0 * math.pi / (SRC_SAMPLES_PER_PERIOD * rate)
    return int(math.ceil(r_max / dr_needed))


def _check_source_resolution(u0: PolarField, s_max: float, t: float) -> None:
    n_need = required_source_points(float(u0.r[-1]), s_max, t)
    if u0.r.size < n_need:
        raise ResolutionError(
            f"source grid too coarse for t = {t}: {u0.r.size} points, "
            f"need at least {n_need}", suggested_n=n_need,
        )


def _flip_eigendata(data: KernelEigendata) -> KernelEigendata:
    """Eigendata of the magnetically reversed operator (for negative times)."""
    if data.source == kernel.SOURCE_AB:
        return kernel.ab_eigendata(-data.ab_alpha, (data.count - 1) // 2)
    p = data.potential
    M = (data.coeffs.shape[0] - 1) // 2
    return kernel.from_spectrum(compute_spectrum(AngularPotential(p.a_coeffs, -p.A_coeffs), M))


def _hankel_integrals(betas: np.ndarray, a: np.ndarray, r_src: np.ndarray,
                      t: float, s: np.ndarray, chunk: int = 384) -> np.ndarray:
    """I_k(s) = int J_{beta_k}(s r') e^{i r'^2/4t} a_k(r') r' dr' for each row of a."""
    dr = float(r_src[1] - r_src[0])
    chirp = np.exp(1j * r_src ** 2 / (4.0 * t)) * r_src * dr
    out = np.empty((betas.size, s.size), dtype=complex)
    for i, b in enumerate(betas):
        # restrict to the support of this mode's profile
        mag = np.abs(a[i])
        peak = float(mag.max()) if mag.size else 0.0
        nz = np.flatnonzero(mag > 1e-15 * peak)
        if nz.size == 0:
            out[i] = 0.0
            continue
        lo, hi = max(int(nz[0]) - 2, 0), min(int(nz[-1]) + 3, r_src.size)
        w_src = a[i, lo:hi] * chirp[lo:hi]
        rs = r_src[lo:hi]
        for c0 in range(0, s.size, chunk):
            sc = s[c0:c0 + chunk]
            J = bessel.j_grid(float(b), np.outer(sc, rs).ravel()).reshape(sc.size, rs.size)
            out[i, c0:c0 + chunk] = J @ w_src
    return out


def _zeta_negative(p: float) -> float:
    """zeta(-p) for p > 0 via the reflection formula."""
    from scipy.special import zeta
    return float(2.0 ** -p * math.pi ** (-p - 1.0) * math.sin(-math.pi * p / 2.0)
                 * math.gamma(1.0 + p) * zeta(1.0 + p))


def _modal_masses(betas: np.ndarray, a: np.ndarray, r_src: np.ndarray, t: float,
                  s: np.ndarray, I: np.ndarray) -> np.ndarray:
    """int |I_k(s)|^2 s ds per mode, with the endpoint-singularity correction.

    Near s = 0, |I_k|^2 s = C_k s^{2 nu + 1}: the uniform-grid sum misses
    zeta(-(2 nu + 1)) C_k ds^{2 nu + 2} (Euler-Maclaurin with an algebraic
    endpoint).  C_k follows from J_nu(x) -> (x/2)^nu / Gamma(nu+1).
    """
    ds = float(s[1] - s[0])
    masses = np.sum(np.abs(I) ** 2 * s[None, :], axis=1) * ds
    dr = float(r_src[1] - r_src[0])
    chirp = np.exp(1j * r_src ** 2 / (4.0 * t)) * r_src * dr
    for i, b in enumerate(betas):
        p = 2.0 * float(b) + 1.0
        if p > 60.0:
            continue   # correction underflows
        moment = np.sum(r_src ** float(b) * chirp * a[i])
        c = abs(moment) ** 2 / (4.0 ** float(b) * math.gamma(float(b) + 1.0) ** 2)
        masses[i] -= _zeta_negative(p) * c * ds ** (p + 1.0)
    return masses


def _evaluation_grid(u0: PolarField, t: float) -> np.ndarray:
    k_rad = radial_bandwidth(u0)
    r_eval = float(u0.r[-1]) + 2.0 * t * (1.25 * k_rad + 1.0)
    ds = math.pi / (S_OVERSAMPLE * float(u0.r[-1]))
    return ds * np.arange(int(math.ceil(r_eval / (2.0 * t) / ds)) + 1)


def _evolve_core(data: KernelEigendata, u0: PolarField, t: float,
                 r_out: np.ndarray | None):
    """Positive-time evolution internals: (field, s grid, I rows, kept indices)."""
    r_src = u0.r
    if r_out is None:
        s = _evaluation_grid(u0, t)
    else:
        r_out = np.asarray(r_out, dtype=float)
        if np.any(r_out < 0):
            raise InvalidInput("output radii must be nonnegative")
        s = r_out / (2.0 * t)
    _check_source_resolution(u0, float(np.max(s)), t)

    a = modal_coefficients(data, u0)
    keep = _retained_modes(data, a, u0)
    I = _hankel_integrals(data.beta[keep], a[keep], r_src, t, s)
    phases = np.array([kernel.i_power(float(b)) for b in data.beta[keep]])
    Psi = data.psi_values(u0.thetas())[keep]
    prefac = np.exp(1j * t * s ** 2) / (2.0j * t)
    values = np.einsum("s,k,ks,kj->sj", prefac, phases, I, Psi, optimize=True)
    return PolarField(r=2.0 * t * s, values=values, t=t), s, I, a, keep


def evolve(data: KernelEigendata, u0: PolarField, t: float,
           r_out: np.ndarray | None = None) -> PolarField:
    """Apply the flow for time t via the Bessel-series representation."""
    if t == 0.0:
        return replace(u0, t=0.0)
    if t < 0.0:
        mirror = evolve(_flip_eigendata(data), replace(u0, values=np.conj(u0.values)),
                        -t, r_out=r_out)
        return PolarField(r=mirror.r, values=np.conj(mirror.values), t=t)
    field, _, _, _, _ = _evolve_core(data, u0, t, r_out)
    return field


def free_evolution(u0: PolarField, t: float, r_out: np.ndarray | None = None) -> PolarField:
    """Evolution with no potential at all (integer-order Bessel route)."""
    if t == 0.0:
        return replace(u0, t=0.0)
    if t < 0.0:
        mirror = free_evolution(replace(u0, values=np.conj(u0.values)), -t, r_out=r_out)
        return PolarField(r=mirror.r, values=np.conj(mirror.values), t=t)
    r_src = u0.r
    r_src_max = float(r_src[-1])
    if r_out is None:
        k_rad = radial_bandwidth(u0)
        r_eval = r_src_max + 2.0 * t * (1.25 * k_rad + 1.0)
        ds = math.pi / (S_OVERSAMPLE * r_src_max)
        s = ds * np.arange(int(math.ceil(r_eval / (2.0 * t) / ds)) + 1)
    else:
        s = np.asarray(r_out, dtype=float) / (2.0 * t)
    _check_source_resolution(u0, float(np.max(s)), t)

    nth = u0.n_theta
    modes = np.fft.fftfreq(nth, 1.0 / nth).astype(int)
    coeff = np.fft.fft(u0.values, axis=1) / nth          # (n_r, n_modes)
    a = (math.sqrt(2.0 * math.pi) * coeff).T
    norms = np.max(np.abs(a), axis=1)
    keep = np.flatnonzero(norms > MODE_KEEP_RTOL * float(np.max(norms)))
    betas = np.abs(modes[keep]).astype(float)
    I = _hankel_integrals(betas, a[keep], r_src, t, s)
    phases = np.array([kernel.i_power(float(b)) for b in betas])
    th = u0.thetas()
    Psi = np.exp(1j * np.outer(modes[keep], th)) / math.sqrt(2.0 * math.pi)
    prefac = np.exp(1j * t * s ** 2) / (2.0j * t)
    values = np.einsum("s,k,ks,kj->sj", prefac, phases, I, Psi, optimize=True)
    return PolarField(r=2.0 * t * s, values=values, t=t)


# -- Crank-Nicolson oracle ---------------------------------------------------------


def _spectral_refine(rows: np.ndarray, n_coarse: int, refine: int) -> np.ndarray:
    """Band-limited upsampling of compactly supported radial profiles.

    `rows[i]` holds samples at dr * (1 .. n_src); returns samples at
    (dr / refine) * (1 .. refine * n_coarse) after zero extension to n_coarse.
    """
    if n_coarse <= rows.shape[1]:
        raise InvalidInput("refinement window must extend past the source support")
    if refine == 1:
        out = np.zeros((rows.shape[0], n_coarse), dtype=complex)
        out[:, :rows.shape[1]] = rows
        return out
    grid = np.zeros((rows.shape[0], n_coarse), dtype=complex)
    grid[:, 1:rows.shape[1] + 1] = rows
    spec = np.fft.fft(grid, axis=1)
    n_fine = refine * n_coarse
    half = n_coarse // 2
    pad = np.zeros((rows.shape[0], n_fine), dtype=complex)
    pad[:, :half] = spec[:, :half]
    pad[:, -half:] = spec[:, -half:]
    fine = np.fft.ifft(pad, axis=1) * refine
    return np.roll(fine, -1, axis=1)   # samples at dr_f * (1 .. n_fine)


def crank_nicolson_oracle(data: KernelEigendata, u0: PolarField, t: float,
                          n_steps: int | None = None, r_max: float | None = None,
                          refine: int = 2) -> PolarField:
    """Modewise radial Crank-Nicolson evolution, sharing only the angular basis.

    Each retained mode solves i dc/dt = (-d^2/dr^2 - (1/r) d/dr + mu_k / r^2) c
    in Liouville form v = sqrt(r) c, where the operator becomes the real
    symmetric tridiagonal -v'' + (mu_k - 1/4) v / r^2 with Dirichlet walls.
    `refine` subdivides the source grid spacing to push down the second-order
    dispersion error of the stencil.  Mass reaching the Dirichlet wall is a
    resolution failure (reflections would contaminate the field).
    """
    if t == 0.0:
        return replace(u0, t=0.0)
    if t < 0.0:
        mirror = crank_nicolson_oracle(
            _flip_eigendata(data), replace(u0, values=np.conj(u0.values)),
            -t, n_steps=n_steps, r_max=r_max, refine=refine)
        return PolarField(r=mirror.r, values=np.conj(mirror.values), t=t)

    dr_src = float(u0.r[1] - u0.r[0])
    k_rad = radial_bandwidth(u0)
    if r_max is None:
        r_max = float(u0.r[-1]) + 2.0 * t * (1.5 * k_rad + 2.0)
    n_coarse = max(int(math.ceil(r_max / dr_src)), u0.r.size + 2)
    dr = dr_src / refine
    n_r = refine * n_coarse
    r = dr * np.arange(1, n_r + 1)
    if n_steps is None:
        lam = (1.5 * k_rad + 2.0) ** 2
        n_steps = max(400, int(math.ceil(abs(t) * lam * 8.0)))
    dt = t / n_steps

    a = modal_coefficients(data, u0)
    keep = _retained_modes(data, a, u0)
    fine = _spectral_refine(a[keep], n_coarse, refine)
    sqrt_r = np.sqrt(r)
    out_modes = np.zeros((keep.size, n_r), dtype=complex)
    off = -1.0 / dr ** 2
    for row, k in enumerate(keep):
        v = fine[row] * sqrt_r
        diag = 2.0 / dr ** 2 + (float(data.mu[k]) - 0.25) / r ** 2
        # banded forms of I +- i dt/2 H for the theta method
        upper = np.full(n_r, 1j * dt / 2.0 * off, dtype=complex)
        lower = upper.copy()
        ab = np.zeros((3, n_r), dtype=complex)
        ab[0, 1:] = upper[1:]
        ab[1] = 1.0 + 1j * dt / 2.0 * diag
        ab[2, :-1] = lower[:-1]
        for _ in range(n_steps):
            rhs = (1.0 - 1j * dt / 2.0 * diag) * v
            rhs[1:] += -1j * dt / 2.0 * off * v[:-1]
            rhs[:-1] += -1j * dt / 2.0 * off * v[1:]
            v = solve_banded((1, 1), ab, rhs)
        out_modes[row] = v / sqrt_r
    Psi = data.psi_values(u0.thetas())[keep]
    values = out_modes.T @ Psi
    field = PolarField(r=r, values=values, t=t)
    # reflection monitor: mass within 2% of the wall must be negligible
    edge = max(int(0.98 * n_r), n_r - 1)
    edge_mass = float(np.sum(np.abs(out_modes[:, edge:]) ** 2 * r[edge:]) * dr)
    total_mass = float(np.sum(np.abs(out_modes) ** 2 * r) * dr)
    if total_mass > 0.0 and edge_mass > 1e-8 * total_mass:
        raise ResolutionError(
            "field reached the Dirichlet wall; enlarge r_max",
            suggested_n=2 * n_coarse,
        )
    return field


def relative_l2_difference(f1: PolarField, f2: PolarField) -> float:
    """|f1 - f2|_L2 / |f2|_L2 for fields on identical grids."""
    if f1.values.shape != f2.values.shape or f1.r.size != f2.r.size:
        raise InvalidInput("fields must share the same polar grid")
    if not np.allclose(f1.r, f2.r):
        raise InvalidInput("fields must share the same radial grid")
    diff = PolarField(r=f1.r, values=f1.values - f2.values, t=f1.t)
    denom = f2.l2_norm()
    if denom == 0.0:
        raise InvalidInput("reference field is zero")
    return diff.l2_norm() / denom


# -- decay functional ---------------------------------------------------------------


@dataclass(frozen=True)
class EvolutionResult:
    """One evolved field with its dispersive-decay statistic."""
    t: float
    field: PolarField
    sup_norm: float
    l2_norm: float
    decay_functional: float       # |t| * sup_norm / |u0|_L1


def evolve_result(data: KernelEigendata, u0: PolarField, t: float) -> EvolutionResult:
    """Evolve on the automatic grid; L2 from per-mode masses (endpoint-corrected)."""
    if t == 0.0:
        return EvolutionResult(t=0.0, field=replace(u0, t=0.0), sup_norm=u0.sup_norm(),
                               l2_norm=u0.l2_norm(), decay_functional=0.0)
    l1 = u0.l1_norm()
    if t < 0.0:
        data = _flip_eigendata(data)
        u0 = replace(u0, values=np.conj(u0.values))
    field, s, I, a, keep = _evolve_core(data, u0, abs(t), None)
    if t < 0.0:
        field = PolarField(r=field.r, values=np.conj(field.values), t=t)
    masses = _modal_masses(data.beta[keep], a[keep], u0.r, abs(t), s, I)
    sup = field.sup_norm()
    return EvolutionResult(t=float(t), field=field, sup_norm=sup,
                           l2_norm=math.sqrt(float(np.sum(masses))),
                           decay_functional=abs(t) * sup / l1)


@dataclass(frozen=True)
class DecayReport:
    rows: list[EvolutionResult]
    l1_initial: float
    l2_initial: float
    empirical_constant: float     # max of the decay functional over the sweep
    max_over_median: float
    l2_max_drift: float


def decay_profile(data: KernelEigendata, u0: PolarField, times) -> DecayReport:
    """|t| |u(t)|_inf / |u0|_L1 over the given times, with L^2 drift tracking."""
    ts = [float(t) for t in times]
    positive = [abs(t) for t in ts if t != 0.0]
    if len(positive) < 2 or max(positive) < 1e3 * min(positive):
        raise InvalidInput("decay sweep must span at least three decades of t")
    l2_0 = u0.l2_norm()
    rows = []
    drift = 0.0
    for t in ts:
        res = evolve_result(data, u0, t)
        rows.append(res)
        drift = max(drift, abs(res.l2_norm - l2_0) / l2_0)
    vals = np.array([r.decay_functional for r in rows])
    return DecayReport(rows=rows, l1_initial=u0.l1_norm(), l2_initial=l2_0,
                       empirical_constant=float(np.max(vals)),
                       max_over_median=float(np.max(vals) / np.median(vals)),
                       l2_max_drift=drift)


# -- field snapshots ----------------------------------------------------------------

SNAPSHOT_MAGIC = b"POLARFLD"


def save_field(path, field: PolarField) -> None:
    """Flat binary snapshot: magic, dims, t, radial grid, interleaved re/im."""
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        np.array([field.r.size, field.n_theta], dtype="<i8").tofile(fh)
        np.array([field.t], dtype="<f8").tofile(fh)
        field.r.astype("<f8").tofile(fh)
        inter = np.empty((field.r.size, field.n_theta, 2))
        inter[..., 0] = field.values.real
        inter[..., 1] = field.values.imag
        inter.astype("<f8").tofile(fh)


def load_field(path) -> PolarField:
    with open(path, "rb") as fh:
        if fh.read(len(SNAPSHOT_MAGIC)) != SNAPSHOT_MAGIC:
            raise InvalidInput(f"not a field snapshot: {path}")
        n_r, n_theta = (int(x) for x in np.fromfile(fh, dtype="<i8", count=2))
        t = float(np.fromfile(fh, dtype="<f8", count=1)[0])
        r = np.fromfile(fh, dtype="<f8", count=n_r)
        inter = np.fromfile(fh, dtype="<f8", count=2 * n_r * n_theta)
    inter = inter.reshape(n_r, n_theta, 2)
    return PolarField(r=r, values=inter[..., 0] + 1j * inter[..., 1], t=t)
