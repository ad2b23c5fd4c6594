"""Bessel-series propagator kernel on the plane, restricted to the unit circle data.

The flow generated by the scaling-critical operator has the integral kernel

    K(x, y) = sum_k i^{-beta_k} J_{beta_k}(|x||y|) psi_k(theta) conj(psi_k(theta')),

where mu_k, psi_k are the angular eigenpairs and beta_k = sqrt(mu_k).  The
formula needs every beta_k real positive, i.e. mu_1 > 0; construction rejects
eigendata violating that.  Since radii enter only through rho = |x||y|, all
evaluators work on (rho, theta, theta') grids.

Branch convention throughout: i^{-beta} := exp(-i pi beta / 2).

Truncation is certified termwise with |J_nu(rho)| <= (rho/2)^nu / Gamma(nu+1)
and sup-norm bounds on the eigenfunctions; beyond the computed eigendata the
operator comparison  L >= (-i d/dtheta + Abar)^2 + min(a)  gives the eigenvalue
lower bound used for the analytic tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bessel
from .errors import HypothesisViolation, InsufficientResolution, InvalidInput
from .galerkin import SpectralDecomposition
from .potentials import AngularPotential

DEFAULT_TOL = 1e-9
SOURCE_GALERKIN = "galerkin"
SOURCE_AB = "closed_form_ab"


def i_power(beta: float) -> complex:
    """i^{-beta} on the fixed branch e^{-i pi beta / 2}."""
    return complex(math.cos(math.pi * beta / 2.0), -math.sin(math.pi * beta / 2.0))


@dataclass(frozen=True)
class KernelEigendata:
    """Angular eigendata packaged for kernel summation, ordered by ascending mu."""
    source: str
    mu: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    sup_bounds: np.ndarray = field(repr=False)      # per-mode sup-norm bounds
    coeffs: np.ndarray | None = field(repr=False)   # basis coefficients (Galerkin)
    ab_modes: np.ndarray | None = field(repr=False) # mode numbers (closed form)
    ab_alpha: float | None
    tail_floor: float        # lower-bound parameters for mu beyond the data:
    tail_abar: float         # mu_k >= (ceil((k-1)/2) - |tail_abar|)^2 + tail_floor
    potential: AngularPotential | None = field(repr=False, default=None)

    @property
    def count(self) -> int:
        return int(self.mu.size)

    def psi_values(self, theta: np.ndarray) -> np.ndarray:
        """Matrix psi_k(theta), one row per retained mode."""
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        if self.source == SOURCE_AB:
            return np.exp(1j * np.outer(self.ab_modes, th)) / math.sqrt(2.0 * math.pi)
        M = (self.coeffs.shape[0] - 1) // 2
        modes = np.arange(-M, M + 1)
        basis = np.exp(1j * np.outer(modes, th)) / math.sqrt(2.0 * math.pi)
        return self.coeffs.T @ basis


def from_spectrum(dec: SpectralDecomposition, count: int | None = None) -> KernelEigendata:
    """Kernel eigendata from a computed decomposition; needs mu_1 > 0."""
    if dec.potential is None:
        raise InvalidInput("decomposition must carry its potential for tail bounds")
    n = dec.resolved_count if count is None else min(count, dec.resolved_count)
    if n < 1:
        raise InsufficientResolution("no certified eigenvalues available")
    mu = np.asarray(dec.eigenvalues[:n], dtype=float)
    if mu[0] <= 0.0:
        raise HypothesisViolation(
            f"kernel formula needs a positive ground eigenvalue; got mu_1 = {mu[0]}"
        )
    p = dec.potential
    sup = dec.sup_norms()[:n]
    amin = float(np.min(p.a_values(np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)).real))
    return KernelEigendata(
        source=SOURCE_GALERKIN, mu=mu, beta=np.sqrt(mu), sup_bounds=np.asarray(sup),
        coeffs=dec.coeffs[:, :n], ab_modes=None, ab_alpha=None,
        tail_floor=amin, tail_abar=abs(p.reduced_circulation), potential=p,
    )


def ab_eigendata(alpha: float, n_modes: int) -> KernelEigendata:
    """Closed-form eigendata for constant circulation alpha (modes |k| <= n_modes)."""
    if abs(alpha) >= 1.0 or alpha == 0.0:
        # alpha = 0 makes mu_0 = 0 (order zero is fine but mu_1 > 0 fails as stated)
        if alpha == 0.0:
            raise HypothesisViolation("alpha = 0 has a zero ground eigenvalue")
        raise InvalidInput("use the reduced circulation |alpha| < 1")
    ks = np.arange(-n_modes, n_modes + 1)
    mu = (ks + alpha) ** 2
    order = np.argsort(mu, kind="stable")
    ks = ks[order]
    mu = mu[order]
    return KernelEigendata(
        source=SOURCE_AB, mu=mu, beta=np.sqrt(mu),
        sup_bounds=np.full(ks.size, 1.0 / math.sqrt(2.0 * math.pi)),
        coeffs=None, ab_modes=ks, ab_alpha=float(alpha),
        tail_floor=0.0, tail_abar=abs(alpha), potential=None,
    )


# -- certified truncation --------------------------------------------------------


def _tail_sup_sq(data: KernelEigendata, mu: float) -> float:
    """A priori sup-norm-squared bound for eigenfunctions beyond the data.

    On the circle, |psi|_inf^2 <= |psi|_2^2 / 2pi + 2 |psi|_2 |psi'|_2 and the
    eigenvalue equation bounds |psi'|_2 by sqrt(mu) plus potential norms.
    """
    if data.source == SOURCE_AB:
        return 1.0 / (2.0 * math.pi)
    p = data.potential
    th = np.linspace(0.0, 2.0 * np.pi, 2048, endpoint=False)
    ca = float(np.max(np.abs(p.a_values(th))))
    cA = float(np.max(np.abs(p.A_values(th))))
    grad = cA + math.sqrt(cA * cA + max(mu, 0.0) + ca + cA * cA)
    return 1.0 / (2.0 * math.pi) + 2.0 * grad


def _mu_lower_beyond(data: KernelEigendata, k: int) -> float:
    """Rigorous lower bound for the k-th eigenvalue (1-based), any k > count."""
    q = (k - 1) // 2
    return max(q - abs(data.tail_abar), 0.0) ** 2 + data.tail_floor


def tail_bound_beyond(data: KernelEigendata, rho: float) -> float:
    """Certified bound on the kernel tail past the computed eigendata.

    Eigenvalues beyond the data come (at worst) in near-double pairs indexed by
    q with mu >= (q - |Abar|)^2 + min(a).  Once sqrt(mu) >= 2 rho + 2 the
    termwise majorant shrinks by more than half per q step, so the remaining
    sum is dominated by a geometric series.
    """
    q = data.count // 2
    total = 0.0
    max_q = q + int(10.0 * rho) + 2000
    while q <= max_q:
        mu_low = max(max(q - abs(data.tail_abar), 0.0) ** 2 + data.tail_floor, 0.0)
        nu = math.sqrt(mu_low)
        pair = 2.0 * bessel.term_tail_bound(nu, rho) * _tail_sup_sq(data, mu_low)
        if not math.isfinite(pair):
            return math.inf
        total += pair
        if nu >= 2.0 * rho + 2.0:
            return total + pair
        q += 1
    return math.inf


def term_bounds(data: KernelEigendata, rho: float) -> np.ndarray:
    """Termwise majorants |J_{beta_k}(rho)| * sup|psi_k|^2 for the computed modes."""
    return np.array([
        bessel.term_tail_bound(b, rho) for b in data.beta
    ]) * data.sup_bounds ** 2


def cutoff_index(data: KernelEigendata, rho: float, tol: float) -> int:
    """Number of leading terms needed so the discarded remainder stays below tol.

    Counts computed-mode majorants from the back plus the beyond-data tail;
    raises InsufficientResolution if even the full data cannot certify tol.
    """
    beyond = tail_bound_beyond(data, rho)
    if not beyond < tol:
        raise InsufficientResolution(
            f"eigendata too short to certify tolerance {tol} at rho = {rho}; "
            f"beyond-data tail bound {beyond:.2e} (compute more modes)"
        )
    bounds = term_bounds(data, rho)
    budget = tol - beyond
    acc = 0.0
    n = data.count
    for k in range(data.count - 1, -1, -1):
        if acc + bounds[k] > budget:
            break
        acc += bounds[k]
        n = k
    return max(n, 1)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    terms_used: int
    tail_bound: float


def kernel_value(data: KernelEigendata, rho: float, theta: float, theta_prime: float,
                 tol: float = DEFAULT_TOL) -> KernelValue:
    """Single-point kernel evaluation with certified truncation error."""
    if rho < 0:
        raise InvalidInput("rho must be nonnegative")
    n = cutoff_index(data, rho, tol)
    beyond = tail_bound_beyond(data, rho)
    dropped = float(np.sum(term_bounds(data, rho)[n:])) + beyond
    pv = data.psi_values(np.array([theta]))[:n, 0]
    pw = data.psi_values(np.array([theta_prime]))[:n, 0]
    val = 0.0 + 0.0j
    for k in range(n):
        b = float(data.beta[k])
        val += i_power(b) * bessel.bessel_j(b, rho).value * pv[k] * np.conj(pw[k])
    return KernelValue(value=complex(val), terms_used=n, tail_bound=dropped)


def _weights_on_rho(data: KernelEigendata, rho: np.ndarray, tol: float) -> np.ndarray:
    """Matrix i^{-beta_k} J_{beta_k}(rho_r), zeroed beyond the per-rho cutoff."""
    rho = np.asarray(rho, dtype=float)
    n_max = max(cutoff_index(data, float(np.max(rho)), tol), 1)
    W = np.zeros((n_max, rho.size), dtype=complex)
    cuts = np.array([cutoff_index(data, float(r), tol) for r in rho])
    for k in range(n_max):
        b = float(data.beta[k])
        vals = bessel.j_grid(b, rho)
        W[k] = i_power(b) * vals
        W[k, cuts <= k] = 0.0
    return W


def evaluate_grid(data: KernelEigendata, rho: np.ndarray, theta: np.ndarray,
                  theta_prime: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """K on a product grid; returns complex array (len(rho), len(theta), len(theta_prime))."""
    W = _weights_on_rho(data, rho, tol)
    n = W.shape[0]
    P = data.psi_values(np.asarray(theta, dtype=float))[:n]
    Q = data.psi_values(np.asarray(theta_prime, dtype=float))[:n]
    return np.einsum("kr,kt,ks->rts", W, P, np.conj(Q), optimize=True)


# -- scans -----------------------------------------------------------------------


@dataclass(frozen=True)
class ScanReport:
    max_abs: float
    argmax: tuple[float, float, float]      # (rho, theta, theta_prime)
    window_edges: np.ndarray = field(repr=False)
    window_maxima: np.ndarray = field(repr=False)   # max within each window
    running_maxima: np.ndarray = field(repr=False)  # max over [0, edge]
    top_two_decade_variation: float
    grid_shape: tuple[int, int, int] = (0, 0, 0)


def sup_scan(data: KernelEigendata, rho_max: float = 50.0, n_rho: int = 200,
             n_theta: int = 64, tol: float = DEFAULT_TOL,
             n_windows: int = 8) -> ScanReport:
    """Max |K| over a (rho, theta, theta') product grid with window trend.

    The trend records the running max over increasing rho windows: a bounded
    kernel plateaus, a divergent one keeps climbing.  The headline statistic
    is the relative growth of the running max over the top two rho decades.
    """
    rho = np.linspace(0.0, rho_max, n_rho)
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    K = evaluate_grid(data, rho, th, th, tol)
    A = np.abs(K)
    idx = np.unravel_index(int(np.argmax(A)), A.shape)
    # geometric window edges spanning two decades up to rho_max
    edges = rho_max * np.logspace(-n_windows * 0.25, 0.0, n_windows + 1)
    wmax = np.zeros(n_windows)
    rmax = np.zeros(n_windows + 1)
    for w in range(n_windows):
        sel = (rho >= edges[w]) & (rho <= edges[w + 1])
        wmax[w] = float(A[sel].max()) if np.any(sel) else 0.0
    for w in range(n_windows + 1):
        rmax[w] = float(A[rho <= edges[w]].max()) if np.any(rho <= edges[w]) else 0.0
    m_low = float(A[rho <= rho_max / 10.0].max())
    m_all = float(A.max())
    variation = (m_all - m_low) / m_all
    return ScanReport(
        max_abs=float(A[idx]), argmax=(float(rho[idx[0]]), float(th[idx[1]]), float(th[idx[2]])),
        window_edges=edges, window_maxima=wmax, running_maxima=rmax,
        top_two_decade_variation=variation, grid_shape=A.shape,
    )


# -- tail comparison against the constant-circulation kernel ----------------------


def _gauge_stripped_psi(data: KernelEigendata, theta: np.ndarray) -> np.ndarray:
    """sqrt(2 pi) e^{i(floor(circ + 1/2) theta + int_0^theta A)} psi_k(theta)."""
    p = data.potential
    if p is None:
        raise InvalidInput("tail comparison needs Galerkin eigendata with a potential")
    th = np.asarray(theta, dtype=float)
    gauge = np.exp(1j * (p.circulation_floor * th + p.integral_A(th)))
    return math.sqrt(2.0 * math.pi) * data.psi_values(th) * gauge[None, :]


@dataclass(frozen=True)
class DifferenceRow:
    ell: int
    max_abs: float
    terms: int


@dataclass(frozen=True)
class DifferenceReport:
    rows: list[DifferenceRow]
    decreasing: bool
    slope: float


def difference_scan(dec: SpectralDecomposition, p: AngularPotential,
                    ells=(4, 8, 16), rho_max: float = 50.0, n_rho: int = 120,
                    n_theta: int = 48, tol: float = DEFAULT_TOL,
                    j_max: int | None = None) -> DifferenceReport:
    """Max over the grid of |Sigma_{|j|>=ell} - e^{i Abar dtheta} Sigma^{ab}_{|j|>=ell}|.

    Sigma is the gauge-stripped tail of the full kernel paired by signed mode
    index; Sigma^{ab} the constant-circulation comparison with alpha = Abar.
    Both tails are truncated at the same |j| <= j_max with certified remainders.
    """
    from .galerkin import pair_modes

    data = from_spectrum(dec)
    ab = p.reduced_circulation
    ells = sorted(int(e) for e in ells)
    if j_max is None:
        # orders above this contribute below tol for every rho in range
        j_max = int(math.e * rho_max / 2.0) + 24
    js = [j for j in range(-j_max, j_max + 1) if abs(j) >= min(ells)]
    pairs = pair_modes(dec, p, js)
    if max(pr.k for pr in pairs) >= data.count:
        raise InsufficientResolution("increase Galerkin size: tail modes unresolved")

    rho = np.linspace(0.0, rho_max, n_rho)
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    chi = _gauge_stripped_psi(data, th)          # (count, n_theta)
    dth = th[:, None] - th[None, :]              # theta - theta'
    rows = []
    for ell in ells:
        acc = np.zeros((n_rho, n_theta, n_theta), dtype=complex)
        terms = 0
        for pr in pairs:
            if abs(pr.j) < ell:
                continue
            b = float(data.beta[pr.k])
            wt = i_power(b) * bessel.j_grid(b, rho)
            gen = np.einsum("r,t,s->rts", wt, chi[pr.k], np.conj(chi[pr.k]))
            bm = abs(pr.j + ab)
            wm = i_power(bm) * bessel.j_grid(bm, rho)
            abk = np.exp(1j * (pr.j + ab) * dth)
            acc += gen - np.einsum("r,ts->rts", wm, abk)
            terms += 1
        rows.append(DifferenceRow(ell=ell, max_abs=float(np.max(np.abs(acc))), terms=terms))
    vals = np.array([r.max_abs for r in rows], dtype=float)
    els = np.array([r.ell for r in rows], dtype=float)
    slope = 0.0
    if np.all(vals > 0) and len(rows) >= 2:
        A = np.vstack([np.log(els), np.ones(els.size)]).T
        slope = float(np.linalg.lstsq(A, np.log(vals), rcond=None)[0][0])
    return DifferenceReport(rows=rows, decreasing=bool(np.all(np.diff(vals) < 0)), slope=slope)
