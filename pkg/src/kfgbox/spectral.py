"""Spectra of the boxed particle under any member of the boundary-condition family.

Two independent routes:

* ``solve_spectrum``: stationary solutions of the second-order equation for
  piecewise-constant potentials, propagated across the box with 2x2 transfer
  matrices; eigenvalues are the energies where the boundary residual map has
  a nontrivial kernel (smallest singular value scan + bounded refinement).
* ``discrete_spectrum``: dense eigensolve of the finite-difference
  Hamiltonian closed by the boundary condition (``assemble_discrete_h``).

Closure of the discrete operator
--------------------------------
Diagonalize ``U = sum_k exp(i theta_k) q_k q_k^dag``. With
``v = [psi(b), psi(a)]`` and outward derivatives ``n = [psi_x(b), -psi_x(a)]``
the condition splits into ``q_k^dag v = 0`` where ``exp(i theta_k) = -1`` and
``q_k^dag n = -tan(theta_k/2)/lam * q_k^dag v`` otherwise. The second kind
eliminates the ghost nodes of the central stencil; the first kind removes
one boundary unknown. Unknowns are mass-weighted (``z = M^(1/2) y``, ``M``
the trapezoid mass of the kept coordinates) so that ``(tau3 (x) 1) H`` is
Hermitian and ``z^dag (tau3 (x) 1) z`` is the trapezoid pseudo-norm.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg as sla
from scipy.optimize import brentq

from .algebra import SZ, singular_projector
from .bc import BCSpec, BoundaryData1, cayley_vectors
from .core import (
    BoundaryData2,
    Grid,
    PhysicalParams,
    Potential,
    TwoComponentState,
    natural_units,
    one_sided_derivatives,
)

__all__ = [
    "Wavenumber",
    "dispersion_k",
    "transfer_matrix",
    "mode_matrix",
    "mode_residual",
    "golden_minimize",
    "secular_function",
    "Eigenvalue",
    "SpectrumResult",
    "solve_spectrum",
    "positive_levels",
    "ClosedHamiltonian",
    "assemble_discrete_h",
    "discrete_spectrum",
    "schrodinger_levels",
    "nonrel_limit_check",
    "ROOT_TOL",
    "IMAG_TOL",
]

ROOT_TOL = 1e-10
FLAG_TOL = 1e-6
IMAG_TOL = 1e-8
DEGENERACY_TOL = 1e-8
DIRICHLET_EIG_TOL = 1e-10


# ---------------------------------------------------------------------------
# analytic route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Wavenumber:
    """``k`` for propagating solutions, ``kappa`` (decay rate) for evanescent ones."""

    value: float
    evanescent: bool

    @property
    def k_squared(self) -> float:
        return -self.value**2 if self.evanescent else self.value**2


def _k_squared(E: float, V0: float, p: PhysicalParams) -> float:
    return ((E - V0) ** 2 - p.rest_energy**2) / (p.hbar * p.light_speed) ** 2


def dispersion_k(E: float, V0: float = 0.0, params: PhysicalParams = None) -> Wavenumber:
    """Wavenumber from ``(hbar c k)^2 = (E - V0)^2 - (m c^2)^2``."""
    p = params or natural_units()
    s = _k_squared(E, V0, p)
    if s >= 0:
        return Wavenumber(float(np.sqrt(s)), False)
    return Wavenumber(float(np.sqrt(-s)), True)


def _cos_sinc(s: float, ell: float) -> tuple[float, float]:
    """``(cos(k ell), sin(k ell)/k)`` continued analytically in ``s = k^2``."""
    z = s * ell * ell
    if z >= 0:
        r = np.sqrt(z)
        return np.cos(r), ell * np.sinc(r / np.pi)
    r = np.sqrt(-z)
    sh = np.sinh(r) / r if r > 1e-8 else 1.0 + r * r / 6.0
    return np.cosh(r), ell * sh


def transfer_matrix(E: float, V: Union[float, Potential], interval, params: PhysicalParams = None) -> np.ndarray:
    """Map ``(psi, psi_x)`` at ``a`` to ``(psi, psi_x)`` at ``b`` for a stationary
    solution; ``psi`` and ``psi_x`` are continuous across potential steps."""
    p = params or natural_units()
    a, b = interval
    pot = V if isinstance(V, Potential) else Potential.constant(float(V))
    T = np.eye(2)
    for start, end, v in pot.segments(a, b):
        s = _k_squared(E, v, p)
        C, S = _cos_sinc(s, end - start)
        T = np.array([[C, S], [-s * S, C]]) @ T
    return T


def _boundary_maps(E, spec: BCSpec, V, params):
    T = transfer_matrix(E, V, spec.interval, params)
    lam = spec.lam
    Ls, Rs = [], []
    # unknowns: psi(a) and lam * psi_x(a)
    for w in (np.array([1.0, 0.0]), np.array([0.0, 1.0 / lam])):
        wb = T @ w
        L, R = cayley_vectors(BoundaryData1(w[0], wb[0], w[1], wb[1]), lam)
        Ls.append(L)
        Rs.append(R)
    return np.column_stack(Ls), np.column_stack(Rs)


def mode_matrix(E: float, spec: BCSpec, V: Union[float, Potential] = 0.0,
                params: PhysicalParams = None) -> np.ndarray:
    """2x2 matrix whose kernel is the set of ``(psi(a), lam psi_x(a))`` giving an
    eigenfunction at energy ``E``. Singular iff ``E`` is an eigenvalue."""
    L, R = _boundary_maps(E, spec, V, params)
    return L - spec.u2 @ R


def mode_residual(E: float, spec: BCSpec, V=0.0, params: PhysicalParams = None,
                  all_values: bool = False):
    """Singular values of ``(C - U)/2`` with ``C = L R^-1`` (smallest by default).

    For real stationary solutions ``C`` is unitary (the Wronskian is
    constant), so the values lie in ``[0, 1]`` and equal ``|sin(phi_j / 2)|``
    for the eigenphases ``phi_j`` of ``U^dag C``. This is :func:`mode_matrix`
    right-multiplied by ``R^-1 / 2``; both vanish at the same energies.
    """
    L, R = _boundary_maps(E, spec, V, params)
    C = np.linalg.solve(R.T, L.T).T
    sv = np.linalg.svd(0.5 * (C - spec.u2), compute_uv=False)
    return sv if all_values else float(sv[-1])


def secular_function(E: float, spec: BCSpec, V=0.0, params: PhysicalParams = None) -> float:
    """Real, continuous function of ``E`` vanishing at eigenvalues.

    Equals ``prod_j sin(phi_j / 2)``; obtained as
    ``-det(mode_matrix) / (4 sqrt(det U) |det R|)``. Simple eigenvalues are
    sign changes; degenerate ones touch zero without crossing.
    """
    L, R = _boundary_maps(E, spec, V, params)
    dR = np.linalg.det(R)
    g = -np.linalg.det(L - spec.u2 @ R) / (4.0 * np.sqrt(np.linalg.det(spec.u2)) * abs(dR))
    return float(g.real)


def golden_minimize(f, lo: float, hi: float, max_iter: int = 300) -> tuple[float, float]:
    """Golden-section search for a minimum of ``f`` on ``[lo, hi]``.

    Runs until the bracket is a few ulps wide; unlike library minimizers it
    has no relative tolerance floor, which matters for V-shaped minima.
    """
    g = 0.5 * (np.sqrt(5.0) - 1.0)
    x1 = hi - g * (hi - lo)
    x2 = lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi)):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


@dataclass(frozen=True)
class Eigenvalue:
    E: float
    branch: int
    residual: float
    multiplicity: int = 1
    converged: bool = True
    imag: float = 0.0
    pseudo_norm: Optional[float] = None


@dataclass
class SpectrumResult:
    eigenvalues: list
    spec: BCSpec
    method: str
    flagged: list = field(default_factory=list)

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.E for e in self.eigenvalues])

    def branch(self, sign: int) -> list:
        out = [e for e in self.eigenvalues if e.branch == sign]
        return sorted(out, key=lambda e: sign * e.E)

    def to_rows(self) -> list[dict]:
        return [
            {"index": i, "E": e.E, "branch": "+" if e.branch > 0 else "-",
             "residual": e.residual, "multiplicity": e.multiplicity}
            for i, e in enumerate(self.eigenvalues)
        ]

    def to_csv(self, fmt: str = "%.12e") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "E", "branch", "residual", "multiplicity"])
        for r in self.to_rows():
            w.writerow([r["index"], fmt % r["E"], r["branch"], fmt % r["residual"], r["multiplicity"]])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"method": self.method, "spec": self.spec.to_dict(),
                           "eigenvalues": self.to_rows(),
                           "flagged": [{"E": e.E, "imag": e.imag, "residual": e.residual}
                                       for e in self.flagged]},
                          indent=2, sort_keys=True)


def _scan_energies(E_range, values, params, length, scan_step):
    p = params
    emin, emax = E_range
    hc = p.hbar * p.light_speed
    dq = scan_step / hc
    pts = [np.array([emin, emax])]
    for v in values:
        reach = max(abs(emax - v), abs(emin - v))
        qmax = np.sqrt(max(reach**2 - p.rest_energy**2, 0.0)) / hc + 2 * dq
        q = np.arange(0.0, qmax + dq, dq)
        e = np.sqrt((hc * q) ** 2 + p.rest_energy**2)
        # evanescent window |E - v| < m c^2, resolved on the scale of the box
        n_ev = int(max(64, 8 * p.rest_energy / scan_step))
        ev = p.rest_energy * np.linspace(-1.0, 1.0, 2 * n_ev + 1)
        pts += [v + e, v - e, v + ev]
    E = np.unique(np.concatenate(pts))
    return E[(E >= emin) & (E <= emax)]


def solve_spectrum(spec: BCSpec, V: Union[float, Potential] = 0.0, E_range=(-20.0, 20.0),
                   params: PhysicalParams = None, scan_step: Optional[float] = None,
                   tol: float = ROOT_TOL) -> SpectrumResult:
    """Real eigenvalues in ``E_range`` for a piecewise-constant potential.

    The scan is uniform in ``hbar c k`` (step ``scan_step``, default
    ``hbar c pi / 4L``) on each branch of every segment's dispersion relation,
    plus a dense sweep of the evanescent window. Sign changes of
    :func:`secular_function` are refined by bisection-type root finding and
    untouched minima of its modulus (degenerate levels) by golden-section
    search. Candidates whose :func:`mode_residual` reaches ``tol`` are
    eigenvalues; those between ``tol`` and ``1e-6`` are reported as flagged.
    """
    p = params or natural_units()
    a, b = spec.interval
    L = b - a
    if scan_step is None:
        scan_step = p.hbar * p.light_speed * np.pi / (4 * L)
    emin, emax = E_range
    if not (np.isfinite(emin) and np.isfinite(emax)):
        raise ValueError("energy range must be finite")
    if emax <= emin:
        return SpectrumResult([], spec, "analytic")
    pot = V if isinstance(V, Potential) else Potential.constant(float(V))
    seg_values = sorted({v for _, _, v in pot.segments(a, b)})
    E = _scan_energies((emin, emax), seg_values, p, L, scan_step)
    res = lambda e: mode_residual(e, spec, pot, p)  # noqa: E731
    g = np.array([secular_function(e, spec, pot, p) for e in E])
    sig = np.abs(g)
    vref = pot.V0 if pot.kind == "constant" else float(np.mean(seg_values))

    candidates = []
    n = len(E)
    for i in range(n):
        if g[i] == 0.0:
            candidates.append(E[i])
        elif i < n - 1 and g[i] * g[i + 1] < 0:
            candidates.append(brentq(lambda e: secular_function(e, spec, pot, p), E[i], E[i + 1],
                                     xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200))
        else:
            # touching zeros (degenerate levels) show up as minima of |g|
            left = sig[i - 1] if i > 0 else np.inf
            right = sig[i + 1] if i < n - 1 else np.inf
            if sig[i] <= left and sig[i] <= right:
                lo, hi = E[max(i - 1, 0)], E[min(i + 1, n - 1)]
                candidates.append(golden_minimize(res, lo, hi)[0])

    found = []
    for e0 in candidates:
        sv = mode_residual(e0, spec, pot, p, all_values=True)
        s0 = float(sv[-1])
        if s0 > FLAG_TOL:
            continue
        mult = max(int(np.sum(sv <= DEGENERACY_TOL)), 1)
        found.append(Eigenvalue(float(e0), 1 if e0 >= vref else -1, s0, mult, s0 <= tol))
    # a root sitting between two scan points can show up as two minima
    merged = []
    for ev in sorted(found, key=lambda e: e.E):
        if merged and abs(ev.E - merged[-1].E) <= 1e-9 * max(1.0, abs(ev.E)):
            if ev.residual < merged[-1].residual:
                merged[-1] = ev
            continue
        merged.append(ev)
    good = [e for e in merged if e.converged]
    flagged = [e for e in merged if not e.converged]
    good.sort(key=lambda e: (abs(e.E), -e.E))
    return SpectrumResult(good, spec, "analytic", flagged)


def positive_levels(result: SpectrumResult, n: Optional[int] = None, with_multiplicity: bool = False):
    """Ascending positive-branch energies (degenerate levels repeated if asked)."""
    out = []
    for e in result.branch(+1):
        out += [e.E] * (e.multiplicity if with_multiplicity else 1)
    return np.array(out[:n] if n is not None else out)


# ---------------------------------------------------------------------------
# discrete route
# ---------------------------------------------------------------------------

@dataclass
class ClosedHamiltonian:
    """Finite-difference Hamiltonian closed by a boundary condition.

    ``matrix`` acts on mass-weighted reduced unknowns ``z`` stacked as
    ``[z1, z2]``. ``basis`` maps reduced, unweighted unknowns to grid values.
    """

    matrix: np.ndarray
    kinetic: np.ndarray          # weighted -d_xx on the reduced unknowns (Hermitian)
    potential: np.ndarray        # weighted V on the reduced unknowns (Hermitian)
    basis: np.ndarray            # grid <- reduced
    mass: np.ndarray             # diagonal trapezoid mass of reduced unknowns
    robin_vectors: np.ndarray    # columns q_k with exp(i theta_k) != -1
    robin_rates: np.ndarray      # -tan(theta_k / 2) / lam
    dirichlet_vectors: np.ndarray
    certificate: float
    spec: BCSpec
    grid: Grid
    params: PhysicalParams
    V: np.ndarray

    @property
    def size(self) -> int:
        return self.mass.size

    @property
    def d2(self) -> np.ndarray:
        """Closed second-difference matrix in unweighted reduced unknowns."""
        s = np.sqrt(self.mass)
        return -(self.kinetic * s[None, :]) / s[:, None]

    @property
    def metric(self) -> np.ndarray:
        return np.concatenate([np.ones(self.size), -np.ones(self.size)])

    def reduce(self, Psi: TwoComponentState) -> np.ndarray:
        """Mass-weighted projection of a grid state onto the closed subspace."""
        W = self.grid.trapezoid_weights()
        proj = self.basis.conj().T * W[None, :]
        s = np.sqrt(self.mass)
        z1 = (proj @ Psi.comp1) / s
        z2 = (proj @ Psi.comp2) / s
        return np.concatenate([z1, z2])

    def expand(self, z: np.ndarray) -> TwoComponentState:
        n = self.size
        s = np.sqrt(self.mass)
        return TwoComponentState(self.basis @ (z[:n] / s), self.basis @ (z[n:] / s))

    def pseudo_inner(self, z1: np.ndarray, z2: np.ndarray) -> complex:
        return complex(np.vdot(z1, self.metric * z2))

    def _edges(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Both components at the three nodes next to each wall: shape (2, 6)."""
        n = self.size
        rows = self.basis[[0, 1, 2, -3, -2, -1], :]
        s = np.sqrt(self.mass)
        return rows @ (z[:n] / s), rows @ (z[n:] / s)

    def _outward(self, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Boundary values ``[f(b), f(a)]`` and closure-consistent outward derivatives."""
        v = np.array([f[-1], f[0]])
        da, db = one_sided_derivatives(f, self.grid.spacing)
        measured = np.array([db, -da])
        Q, D = self.robin_vectors, self.dirichlet_vectors
        n = Q @ (self.robin_rates * (Q.conj().T @ v))
        if D.shape[1]:
            n = n + D @ (D.conj().T @ measured)
        return v, n

    def boundary_data(self, z: np.ndarray) -> BoundaryData1:
        """Endpoint data of ``psi = psi1 + psi2`` with derivatives consistent with the closure."""
        c1, c2 = self._edges(z)
        v, n = self._outward(c1 + c2)
        return BoundaryData1(v[1], v[0], -n[1], n[0])

    def boundary_data2(self, z: np.ndarray) -> BoundaryData2:
        """Two-component endpoint data; ``psi1 - psi2`` derivatives from one-sided stencils."""
        c1, c2 = self._edges(z)
        d = self.boundary_data(z)
        ca, cb = one_sided_derivatives(c1 - c2, self.grid.spacing)
        return BoundaryData2(
            np.array([c1[0], c2[0]]),
            np.array([c1[-1], c2[-1]]),
            0.5 * np.array([d.dpsi_a + ca, d.dpsi_a - ca]),
            0.5 * np.array([d.dpsi_b + cb, d.dpsi_b - cb]),
        )


def _split_boundary_matrix(u2: np.ndarray):
    T, Z = sla.schur(u2, output="complex")
    phases = np.diag(T)
    dirichlet = np.abs(phases + 1.0) <= DIRICHLET_EIG_TOL
    robin = ~dirichlet
    return Z[:, robin], phases[robin], Z[:, dirichlet]


def assemble_discrete_h(spec: BCSpec, grid: Grid, V=None, params: PhysicalParams = None) -> ClosedHamiltonian:
    """Closed Hamiltonian ``(hbar^2/2m) P (x) A + m c^2 tau3 (x) 1 + 1 (x) V``.

    ``A`` is the mass-weighted, ghost-eliminated ``-d_xx``. The attached
    certificate is ``max |G H - (G H)^dag|`` with ``G = tau3 (x) 1``.
    """
    p = params or natural_units()
    N = grid.n_points
    if N < 8:
        raise ValueError("need at least 8 grid points")
    if not np.isclose(grid.a, spec.interval[0]) or not np.isclose(grid.b, spec.interval[1]):
        raise ValueError("grid and boundary condition refer to different intervals")
    h = grid.spacing
    Q, phases, D = _split_boundary_matrix(spec.u2)
    with np.errstate(divide="raise", invalid="raise"):
        try:
            rates = -np.tan(0.5 * np.angle(phases)) / spec.lam
        except FloatingPointError:
            raise ValueError("ghost elimination is singular for this boundary matrix") from None
    rates = rates.real.astype(float)

    nb = Q.shape[1]
    n = (N - 2) + nb
    basis = np.zeros((N, n), dtype=complex)
    basis[1:N - 1, :N - 2] = np.eye(N - 2)
    # boundary slot ordering is [node N-1, node 0]
    basis[N - 1, N - 2:] = Q[0, :]
    basis[0, N - 2:] = Q[1, :]

    # stiffness sum (1/h)|f_{i+1} - f_i|^2 and the boundary (Robin) term
    Sfull = (np.diag(np.r_[1.0, 2.0 * np.ones(N - 2), 1.0])
             - np.diag(np.ones(N - 1), 1) - np.diag(np.ones(N - 1), -1)) / h
    Kb = Q @ np.diag(rates) @ Q.conj().T
    E = np.zeros((N, 2))
    E[N - 1, 0] = E[0, 1] = 1.0
    stiff = basis.conj().T @ (Sfull - E @ Kb @ E.T) @ basis
    W = grid.trapezoid_weights()
    mass = np.real(np.einsum("ij,i,ij->j", basis.conj(), W, basis))
    Vvals = np.zeros(N) if V is None else (
        V.values(grid) if isinstance(V, Potential) else np.broadcast_to(np.asarray(V, float), (N,)).copy())
    pot = basis.conj().T @ (W[:, None] * Vvals[:, None] * basis)

    s = 1.0 / np.sqrt(mass)
    A = s[:, None] * stiff * s[None, :]
    Vw = s[:, None] * pot * s[None, :]
    # exact Hermitian parts; the discarded skew parts are pure round-off
    A = 0.5 * (A + A.conj().T)
    Vw = 0.5 * (Vw + Vw.conj().T)

    P = singular_projector()
    I = np.eye(n)
    H = (p.hbar**2 / (2 * p.mass)) * np.kron(P, A) + p.rest_energy * np.kron(SZ, I) + np.kron(np.eye(2), Vw)
    G = np.concatenate([np.ones(n), -np.ones(n)])
    GH = G[:, None] * H
    cert = float(np.max(np.abs(GH - GH.conj().T)))
    return ClosedHamiltonian(H, A, Vw, basis, mass, Q, rates, D, cert, spec, grid, p, Vvals)


def discrete_spectrum(spec: BCSpec, grid: Grid, V=None, params: PhysicalParams = None,
                      closed: Optional[ClosedHamiltonian] = None,
                      return_vectors: bool = False):
    """Dense eigensolve of the closed Hamiltonian.

    Eigenvalues with ``|Im E| > 1e-8 max(1, |E|)`` are put in ``flagged``.
    Branch is the sign of the eigenvector's pseudo-norm.
    """
    ch = closed or assemble_discrete_h(spec, grid, V, params)
    try:
        w, vecs = sla.eig(ch.matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc
    G = ch.metric
    good, flagged = [], []
    for i, E in enumerate(w):
        v = vecs[:, i]
        pn = float(np.real(np.vdot(v, G * v)) / np.vdot(v, v).real)
        ev = Eigenvalue(float(E.real), 1 if pn > 0 else -1, 0.0, 1,
                        abs(E.imag) <= IMAG_TOL * max(1.0, abs(E)), float(E.imag), pn)
        (good if ev.converged else flagged).append((ev, i))
    good.sort(key=lambda t: (abs(t[0].E), -t[0].E))
    res = SpectrumResult([g[0] for g in good], spec, "discrete", [f[0] for f in flagged])
    if return_vectors:
        order = [g[1] for g in good]
        return res, w[order], vecs[:, order]
    return res


# ---------------------------------------------------------------------------
# nonrelativistic limit
# ---------------------------------------------------------------------------

def schrodinger_levels(spec: BCSpec, params: PhysicalParams = None, n_levels: int = 3,
                       e_max: Optional[float] = None) -> np.ndarray:
    """Lowest levels of ``-(hbar^2/2m) psi'' = eps psi`` under the same boundary condition."""
    p = params or natural_units()
    a, b = spec.interval
    L = b - a
    # a Schrodinger problem is the KFG stationary problem with k^2 = 2 m eps / hbar^2;
    # solve it in k^2 directly through the same boundary map
    unit = PhysicalParams(1.0, 1.0, 1.0)

    def resid(eps):
        s = 2 * p.mass * eps / p.hbar**2
        # choose E with (E^2 - 1) = s in unit params
        E = np.sqrt(1.0 + s + 0j)
        if abs(E.imag) > 0:
            # evanescent: E in (-1, 1) real with E^2 - 1 = s < 0
            E = np.sqrt(max(1.0 + s, 0.0))
        return mode_residual(float(np.real(E)), spec, 0.0, unit)

    scale = p.hbar**2 * np.pi**2 / (2 * p.mass * L**2)
    e_max = e_max or scale * (n_levels + 2) ** 2
    e_min = -p.hbar**2 / (2 * p.mass) * max(1.0, *(1.0 / spec.lam**2,)) * 4
    # scan uniformly in k (or kappa)
    ks = np.arange(0.0, np.sqrt(2 * p.mass * e_max) / p.hbar, np.pi / (8 * L))
    kap = np.linspace(0.0, np.sqrt(-2 * p.mass * e_min) / p.hbar, 400)[1:]
    eps = np.unique(np.concatenate([-(p.hbar * kap) ** 2 / (2 * p.mass),
                                    (p.hbar * ks) ** 2 / (2 * p.mass)]))
    sig = np.array([resid(e) for e in eps])
    roots = []
    for i in range(1, len(eps) - 1):
        if sig[i] <= sig[i - 1] and sig[i] <= sig[i + 1]:
            if sig[i] == 0:
                roots.append(eps[i])
                continue
            x, fx = golden_minimize(resid, eps[i - 1], eps[i + 1])
            if fx <= ROOT_TOL:
                roots.append(float(x))
    if sig[0] <= ROOT_TOL:
        roots.append(eps[0])
    roots = sorted(set(np.round(roots, 13)))
    return np.array(roots[:n_levels])


def nonrel_limit_check(spec: BCSpec, light_speeds: Sequence[float], mass: float = 1.0,
                       hbar: float = 1.0, n_levels: int = 1) -> dict:
    """``E_n - m c^2`` against the Schrodinger levels with the same ``U`` and ``lam``.

    Returns the relative errors per ``c`` and the empirical order in ``1/c^2``
    (log base 4 of successive error ratios for doubling ``c``).
    """
    ref_params = PhysicalParams(mass, 1.0, hbar)
    ref = schrodinger_levels(spec, ref_params, n_levels)
    rows = []
    for c in light_speeds:
        p = PhysicalParams(mass, float(c), hbar)
        mc2 = p.rest_energy
        top = mc2 + 2.0 * max(abs(ref[-1]), 1.0) + 1.0
        bottom = mc2 + min(ref[0], 0.0) - 1.0
        res = solve_spectrum(spec, 0.0, (bottom, top), p)
        levels = positive_levels(res, n_levels) - mc2
        rel = np.abs(levels - ref) / np.maximum(np.abs(ref), 1e-300)
        abs_err = np.abs(levels - ref)
        rows.append({"c": float(c), "levels": levels, "reference": ref,
                     "rel_error": rel, "abs_error": abs_err})
    orders = []
    for r0, r1 in zip(rows, rows[1:]):
        ratio = r0["abs_error"] / np.maximum(r1["abs_error"], 1e-300)
        step = np.log(r1["c"] / r0["c"])
        with np.errstate(divide="ignore", invalid="ignore"):
            orders.append(np.log(ratio) / (2 * step))
    return {"rows": rows, "reference": ref, "orders": orders,
            "ratios": [r0["abs_error"] / np.maximum(r1["abs_error"], 1e-300)
                       for r0, r1 in zip(rows, rows[1:])]}
