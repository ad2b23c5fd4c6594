"""Fourier-Galerkin spectra of the angular operator on the circle.

The operator acts on 2pi-periodic functions as

    L phi = -phi'' + [a + A^2 - i A'] phi - 2 i A phi'

and is Hermitian on L^2 of the circle.  In the orthonormal basis
e_j = e^{i j theta} / sqrt(2 pi), j = -M..M, the matrix entries are

    H[j', j] = j^2 delta_{j'j} + V_{j'-j} + 2 j A_{j'-j},

where V_m are the Fourier coefficients of a + A^2 - i A' (so V_m =
(a + A^2)_m + m A_m) and A_m those of A.  Hermiticity then holds entry-wise;
a defensive symmetrization asserts it numerically before solving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientResolution, InvalidInput, InvalidMatrix
from .potentials import AngularPotential, constant_potential, theta_grid

HERMITIAN_DEFECT_TOL = 1e-12
RESOLVE_FACTOR = 1.5
RESOLVE_RTOL = 1e-9
CLUSTER_GAP = 1e-8


def _convolved_coeffs(p: AngularPotential) -> tuple[np.ndarray, np.ndarray, int]:
    """Coefficients of V = a + A^2 - i A' and of A, on a common mode range."""
    A = p.A_coeffs
    a = p.a_coeffs
    A2 = np.convolve(A, A)  # bandwidth doubles
    bw = max(p.a_bandwidth, 2 * p.A_bandwidth)
    modes = np.arange(-bw, bw + 1)
    V = np.zeros(2 * bw + 1, dtype=complex)

    def _acc(dst_modes, coeffs):
        m0 = coeffs.size // 2
        lo = bw - m0
        dst_modes[lo:lo + coeffs.size] += coeffs

    _acc(V, a)
    _acc(V, A2)
    V += modes * _padded(A, bw)  # -i A' contributes m * A_m
    return V, _padded(A, bw), bw


def _padded(c: np.ndarray, bw: int) -> np.ndarray:
    m0 = c.size // 2
    out = np.zeros(2 * bw + 1, dtype=complex)
    out[bw - m0:bw + m0 + 1] = c
    return out


def assemble_matrix(p: AngularPotential, M: int) -> np.ndarray:
    """Dense (2M+1)^2 Hermitian matrix of the angular operator."""
    if M < 1:
        raise InvalidInput("M must be >= 1")
    V, A, bw = _convolved_coeffs(p)
    n = 2 * M + 1
    js = np.arange(-M, M + 1)
    H = np.zeros((n, n), dtype=complex)
    H[np.arange(n), np.arange(n)] = js.astype(float) ** 2
    for m in range(-min(bw, n - 1), min(bw, n - 1) + 1):
        Vm = V[bw + m]
        Am = A[bw + m]
        if Vm == 0 and Am == 0:
            continue
        # entry (j+m, j): V_m + 2 j A_m
        idx = np.arange(max(0, -m), min(n, n - m))
        H[idx + m, idx] += Vm + 2.0 * js[idx] * Am
    defect = float(np.max(np.abs(H - H.conj().T)))
    scale = max(1.0, float(np.max(np.abs(H))))
    if defect > HERMITIAN_DEFECT_TOL * scale:
        raise InvalidMatrix(f"assembled matrix is not Hermitian (defect {defect:.2e})")
    return 0.5 * (H + H.conj().T)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of the angular operator at truncation M.

    `coeffs[:, k]` holds the Fourier coefficients (modes -M..M) of the k-th
    eigenfunction in the orthonormal basis e^{i j theta} / sqrt(2 pi); columns
    are L^2-orthonormal and phase-fixed so the largest-modulus coefficient is
    real positive.  `resolved_count` eigenvalues agree with a larger-M re-solve
    to relative 1e-9.
    """

    eigenvalues: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    M: int
    resolved_count: int
    hermitian_defect: float
    potential: AngularPotential | None = None

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def eigenfunction_values(self, k: int, theta: np.ndarray) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        ph = np.exp(1j * np.outer(th, self.modes))
        return (ph @ self.coeffs[:, k]) / math.sqrt(2.0 * math.pi)

    def eigenfunctions_on_grid(self, n: int) -> np.ndarray:
        """(n, n_eig) samples of all eigenfunctions on theta_grid(n)."""
        if n < 2 * self.M + 2:
            raise InvalidInput("grid too coarse for the stored bandwidth")
        z = np.zeros((n, self.coeffs.shape[1]), dtype=complex)
        z[self.modes % n, :] = self.coeffs
        return np.fft.ifft(z, axis=0) * n / math.sqrt(2.0 * math.pi)

    def sup_norms(self) -> np.ndarray:
        """Rigorous upper bounds of eigenfunction sup norms (l1 of coefficients)."""
        return np.sum(np.abs(self.coeffs), axis=0) / math.sqrt(2.0 * math.pi)


def _phase_fix(U: np.ndarray) -> np.ndarray:
    out = U.copy()
    for k in range(U.shape[1]):
        i = int(np.argmax(np.abs(U[:, k])))
        c = U[i, k]
        if c != 0:
            out[:, k] = U[:, k] * (np.conj(c) / abs(c))
    return out


def eigensolve(H: np.ndarray, potential: AngularPotential | None = None,
               resolved_count: int = 0) -> SpectralDecomposition:
    """Backward-stable dense Hermitian eigensolve with phase fixing."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] % 2 != 1:
        raise InvalidInput("matrix must be square with odd dimension 2M+1")
    defect = float(np.max(np.abs(H - H.conj().T)))
    scale = max(1.0, float(np.max(np.abs(H))))
    if defect > HERMITIAN_DEFECT_TOL * scale:
        raise InvalidMatrix(f"matrix is not Hermitian (defect {defect:.2e})")
    w, U = np.linalg.eigh(0.5 * (H + H.conj().T))
    U = _phase_fix(U)
    M = H.shape[0] // 2
    return SpectralDecomposition(
        eigenvalues=w, coeffs=U, M=M, resolved_count=resolved_count,
        hermitian_defect=defect, potential=potential,
    )


def compute_spectrum(p: AngularPotential, M: int,
                     resolve_factor: float = RESOLVE_FACTOR,
                     rtol: float = RESOLVE_RTOL) -> SpectralDecomposition:
    """Assemble and solve at M, then certify leading eigenvalues against M' = ceil(1.5 M)."""
    dec = eigensolve(assemble_matrix(p, M), potential=p)
    Mp = int(math.ceil(resolve_factor * M))
    ref = np.linalg.eigvalsh(assemble_matrix(p, Mp))
    n = dec.eigenvalues.size
    count = 0
    for i in range(n):
        if abs(dec.eigenvalues[i] - ref[i]) <= rtol * max(1.0, abs(ref[i])):
            count += 1
        else:
            break
    return SpectralDecomposition(
        eigenvalues=dec.eigenvalues, coeffs=dec.coeffs, M=M,
        resolved_count=count, hermitian_defect=dec.hermitian_defect, potential=p,
    )


def ab_spectrum(alpha: float, M: int) -> SpectralDecomposition:
    """Exact closed-form spectrum for constant A = alpha, a = 0."""
    js = np.arange(-M, M + 1)
    vals = (js + alpha) ** 2
    order = np.argsort(vals, kind="stable")
    n = 2 * M + 1
    U = np.zeros((n, n))
    U[order, np.arange(n)] = 1.0
    return SpectralDecomposition(
        eigenvalues=vals[order].astype(float), coeffs=U.astype(complex), M=M,
        resolved_count=n, hermitian_defect=0.0,
        potential=constant_potential(0.0, alpha),
    )


def spectrum_rows(dec: SpectralDecomposition):
    """CSV-ready `(k, mu_k)` rows, k starting at 1."""
    return [(k + 1, float(mu)) for k, mu in enumerate(dec.eigenvalues)]


# -- mode pairing -------------------------------------------------------------


@dataclass(frozen=True)
class ModePairing:
    j: int
    k: int                # column index into the decomposition
    overlap: float
    cluster_flag: bool    # eigenvalue has a near-degenerate partner
    ambiguous: bool       # runner-up overlap too close to call


def _gauge_profile_coeffs(p: AngularPotential, M: int) -> np.ndarray:
    """Coefficients (modes -M..M) of e^{-i P(theta)}, P = periodic part of int A."""
    n = 1
    while n < 8 * (M + p.A_bandwidth + 1):
        n *= 2
    th = theta_grid(n)
    P = p.integral_A(th) - p.circulation * th
    q = np.fft.fft(np.exp(-1j * P)) / n
    modes = np.arange(-M, M + 1)
    return q[modes % n]


def model_coeff_vector(p: AngularPotential, j: int, M: int,
                       base: np.ndarray | None = None) -> np.ndarray:
    """Coefficient vector of the model eigenfunction for signed index j.

    Model: (1/sqrt(2pi)) exp(-i(L theta + int_0^theta A)) exp(i (Atil + j) theta)
    with L = floor(Atil + 1/2); equals e^{i(j - L) theta} e^{-i P} / sqrt(2pi).
    """
    if base is None:
        base = _gauge_profile_coeffs(p, M)
    shift = j - p.circulation_floor
    out = np.zeros(2 * M + 1, dtype=complex)
    src_modes = np.arange(-M, M + 1)
    dst = src_modes + shift
    ok = (dst >= -M) & (dst <= M)
    out[dst[ok] + M] = base[src_modes[ok] + M]
    return out


def pair_modes(dec: SpectralDecomposition, p: AngularPotential,
               j_list) -> list[ModePairing]:
    """Match signed asymptotic indices j to decomposition columns by overlap."""
    base = _gauge_profile_coeffs(p, dec.M)
    out = []
    w = dec.eigenvalues
    for j in j_list:
        mv = model_coeff_vector(p, int(j), dec.M, base=base)
        ov = np.abs(dec.coeffs.conj().T @ mv)
        k = int(np.argmax(ov))
        second = float(np.partition(ov, -2)[-2]) if ov.size > 1 else 0.0
        gap_prev = abs(w[k] - w[k - 1]) if k > 0 else np.inf
        gap_next = abs(w[k] - w[k + 1]) if k + 1 < w.size else np.inf
        cluster = min(gap_prev, gap_next) < CLUSTER_GAP * max(1.0, abs(w[k]))
        out.append(ModePairing(
            j=int(j), k=k, overlap=float(ov[k]),
            cluster_flag=bool(cluster),
            ambiguous=bool(second > 0.8 * ov[k]),
        ))
    return out


# -- eigenvalue cluster check --------------------------------------------------


@dataclass(frozen=True)
class ClusterRow:
    k: int
    center: float
    radius: float
    count: int


@dataclass(frozen=True)
class ClusterReport:
    passed: bool
    smallest_c: float
    disjoint: bool
    rows: list[ClusterRow]
    alpha_bound: float


def cluster_check(dec: SpectralDecomposition, p: AngularPotential,
                  k_min: int, k_max: int) -> ClusterReport:
    """Exactly-two-eigenvalues-per-ball check around the squared integers.

    Balls are B(k^2, c + sqrt(alpha_bound + 4 k^2 Abar^2)) with alpha_bound the
    squared sup norm of a + Abar^2; reports the smallest c >= 0 that works and
    whether consecutive balls stay disjoint.
    """
    if k_max <= k_min or k_min < 1:
        raise InvalidInput("need 1 <= k_min < k_max")
    ab = p.reduced_circulation
    th = theta_grid(4096)
    alpha_bound = float(np.max(np.abs(p.a_values(th) + ab ** 2)) ** 2)
    w = np.sort(dec.eigenvalues[:dec.resolved_count])
    edge = (k_max + 1.0) ** 2
    if w.size < 4 or w[-1] < edge:
        raise InsufficientResolution(
            f"resolved spectrum tops out at {w[-1] if w.size else 'nothing'}; "
            f"need eigenvalues beyond {edge:.1f} - increase M"
        )
    base = {k: math.sqrt(alpha_bound + 4.0 * k * k * ab * ab)
            for k in range(k_min, k_max + 1)}
    c_needed = 0.0
    for k in range(k_min, k_max + 1):
        d = np.sort(np.abs(w - k * k))
        c_needed = max(c_needed, max(0.0, float(d[1]) - base[k]))
    rows = []
    ok = True
    for k in range(k_min, k_max + 1):
        r = c_needed + base[k]
        cnt = int(np.sum(np.abs(w - k * k) <= r))
        rows.append(ClusterRow(k=k, center=float(k * k), radius=r, count=cnt))
        if cnt != 2:
            ok = False
    disjoint = all(
        (k + 1) ** 2 - k ** 2 > (c_needed + base[k]) + (c_needed + base.get(k + 1, 0.0))
        for k in range(k_min, k_max)
    )
    return ClusterReport(passed=ok and disjoint, smallest_c=c_needed,
                         disjoint=disjoint, rows=rows, alpha_bound=alpha_bound)


# -- coarse localization window -------------------------------------------------


def weyl_window_check(dec: SpectralDecomposition, p: AngularPotential,
                      delta: float = 0.1, slack: float | None = None) -> bool:
    """Coarse two-sided window for every resolved eigenvalue (sorted order)."""
    ab = abs(p.reduced_circulation)
    atil = p.a_mean
    if slack is None:
        th = theta_grid(2048)
        slack = float(np.max(np.abs(p.a_values(th) - atil))) + 1.0
    for i in range(dec.resolved_count):
        k = i + 1
        q = (k + 1) // 2  # ceil(k/2)
        lo = atil + (max(q - 1 - ab - delta, 0.0)) ** 2 - slack
        hi = atil + (q + ab + delta) ** 2 + slack
        if not (lo <= dec.eigenvalues[i] <= hi):
            return False
    return True


def subspace_angle(U1: np.ndarray, U2: np.ndarray) -> float:
    """Largest principal angle (radians) between the column spans of U1, U2."""
    Q1, _ = np.linalg.qr(np.atleast_2d(U1.T).T if U1.ndim == 1 else U1)
    Q2, _ = np.linalg.qr(np.atleast_2d(U2.T).T if U2.ndim == 1 else U2)
    s = np.linalg.svd(Q1.conj().T @ Q2, compute_uv=False)
    s = np.clip(s, -1.0, 1.0)
    return float(np.arccos(np.min(s)))


def degenerate_clusters(dec: SpectralDecomposition, gap: float = CLUSTER_GAP):
    """Indices grouped into clusters of eigenvalues closer than `gap` (relative)."""
    w = dec.eigenvalues
    groups = [[0]]
    for i in range(1, w.size):
        if abs(w[i] - w[i - 1]) < gap * max(1.0, abs(w[i])):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups
