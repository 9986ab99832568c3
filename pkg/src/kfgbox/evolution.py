"""Crank-Nicolson evolution of two-component states with conservation monitors.

States are advanced in the mass-weighted reduced coordinates of a
:class:`~kfgbox.spectral.ClosedHamiltonian`. Because ``(tau3 (x) 1) H`` is
Hermitian there, the Cayley step preserves ``z^dag (tau3 (x) 1) z`` (the
trapezoid pseudo-norm) up to round-off, whatever the spectrum of ``H``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import linalg as sla

from .bc import BCSpec, mixed_boundary_form
from .core import Grid, PhysicalParams, ScalarState, TwoComponentState, natural_units
from .fv import to_fv
from .observables import boundary_current, boundary_term_f, pseudo_inner
from .spectral import IMAG_TOL, ClosedHamiltonian, assemble_discrete_h

__all__ = [
    "CrankNicolson",
    "cn_step",
    "EvolutionTrace",
    "evolve",
    "RateMonitor",
    "two_state_rate_monitor",
    "gaussian_packet",
    "eigenmode",
    "project_to_modes",
    "default_dt",
]


def default_dt(grid: Grid, params: PhysicalParams = None) -> float:
    """``0.5 h / c``."""
    p = params or natural_units()
    return 0.5 * grid.spacing / p.light_speed


def _matrix(H) -> np.ndarray:
    return H.matrix if isinstance(H, ClosedHamiltonian) else np.asarray(H)


class CrankNicolson:
    """Pre-factored Cayley propagator ``(1 + i dt H / 2 hbar)^-1 (1 - i dt H / 2 hbar)``."""

    def __init__(self, H, dt: float, hbar: float = 1.0):
        if not np.isfinite(dt) or dt == 0:
            raise ValueError("time step must be finite and nonzero")
        H = _matrix(H)
        n = H.shape[0]
        k = 0.5j * dt / hbar
        self.dt = dt
        self.rhs = np.eye(n) - k * H
        lhs = np.eye(n) + k * H
        lu, piv = sla.lu_factor(lhs, check_finite=True)
        if np.min(np.abs(np.diag(lu))) <= np.finfo(float).eps * np.max(np.abs(np.diag(lu))):
            raise np.linalg.LinAlgError("singular linear system in Crank-Nicolson step")
        self._lu = (lu, piv)

    def step(self, z: np.ndarray) -> np.ndarray:
        return sla.lu_solve(self._lu, self.rhs @ z)


def cn_step(z: np.ndarray, H, dt: float, hbar: Optional[float] = None) -> np.ndarray:
    """One Crank-Nicolson step (negative ``dt`` steps backwards)."""
    if hbar is None:
        hbar = H.params.hbar if isinstance(H, ClosedHamiltonian) else 1.0
    return CrankNicolson(H, dt, hbar).step(np.asarray(z, dtype=complex))


def gaussian_packet(grid: Grid, center: float, width: float, momentum: float = 0.0,
                    params: PhysicalParams = None) -> TwoComponentState:
    """Mostly positive-frequency packet: ``psi = exp(-(x-x0)^2 / 2w^2 + i k0 x)`` with
    ``psi_t = -i E(k0) psi / hbar``."""
    p = params or natural_units()
    if width <= 0:
        raise ValueError("packet width must be positive")
    x = grid.x
    psi = np.exp(-((x - center) ** 2) / (2 * width**2) + 1j * momentum * x)
    E = np.hypot(p.hbar * p.light_speed * momentum, p.rest_energy)
    return to_fv(ScalarState(psi, -1j * E / p.hbar * psi, p))


def _eig(ch: ClosedHamiltonian):
    w, vecs = sla.eig(ch.matrix)
    return w, vecs


def eigenmode(ch: ClosedHamiltonian, index: int = 0, branch: int = 1):
    """``(E, z)`` of the ``index``-th real eigenvalue on the given branch (ascending ``|E|``)."""
    w, vecs = _eig(ch)
    G = ch.metric
    rows = []
    for i, E in enumerate(w):
        v = vecs[:, i]
        if abs(E.imag) > IMAG_TOL * max(1.0, abs(E)):
            continue
        pn = np.real(np.vdot(v, G * v))
        if np.sign(pn) == branch:
            rows.append((abs(E.real), E.real, v / np.sqrt(abs(pn))))
    rows.sort(key=lambda r: r[0])
    if index >= len(rows):
        raise IndexError(f"only {len(rows)} modes on that branch")
    _, E, v = rows[index]
    return float(E), v


def project_to_modes(ch: ClosedHamiltonian, z: np.ndarray, e_cut: Optional[float] = None,
                     real_only: bool = True) -> np.ndarray:
    """Expand ``z`` in eigenvectors of the closed Hamiltonian and drop modes with
    complex energy (if ``real_only``) or ``|E| > e_cut``."""
    w, vecs = _eig(ch)
    coef = np.linalg.solve(vecs, z)
    keep = np.ones(w.size, dtype=bool)
    if real_only:
        keep &= np.abs(w.imag) <= IMAG_TOL * np.maximum(1.0, np.abs(w))
    if e_cut is not None:
        keep &= np.abs(w) <= e_cut
    return vecs[:, keep] @ coef[keep]


@dataclass
class EvolutionTrace:
    times: np.ndarray
    pseudo_norm: np.ndarray
    j_a: np.ndarray
    j_b: np.ndarray
    boundary_term: np.ndarray
    mixed: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def norm_drift(self) -> float:
        """``max |N(t) - N(0)| / |N(0)|`` (absolute when ``N(0) = 0``)."""
        n0 = self.pseudo_norm[0]
        dev = float(np.max(np.abs(self.pseudo_norm - n0)))
        return dev / abs(n0) if n0 != 0 else dev

    def current_mismatch(self) -> float:
        return float(np.max(np.abs(self.j_a - self.j_b)))

    def max_wall_current(self) -> float:
        return float(max(np.max(np.abs(self.j_a)), np.max(np.abs(self.j_b))))

    def to_csv(self, fmt: str = "%.12e", header: Optional[list[str]] = None) -> str:
        buf = io.StringIO()
        for line in header or []:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "pseudo_norm", "j_a", "j_b", "boundary_term"])
        for row in zip(self.times, self.pseudo_norm, self.j_a, self.j_b, self.boundary_term):
            w.writerow([fmt % v for v in row])
        return buf.getvalue()


def _initial_z(Psi0, ch: ClosedHamiltonian) -> np.ndarray:
    if isinstance(Psi0, TwoComponentState):
        return ch.reduce(Psi0)
    z = np.asarray(Psi0, dtype=complex)
    if z.shape != (2 * ch.size,):
        raise ValueError("reduced state has the wrong length")
    return z


def _record(ch: ClosedHamiltonian, z: np.ndarray):
    p = ch.params
    d1 = ch.boundary_data(z)
    ja, jb = boundary_current(d1, p)
    d2 = ch.boundary_data2(z)
    f = boundary_term_f(d2, d2, params=p, tol=1e-9)
    return ch.pseudo_inner(z, z).real, ja, jb, abs(f)


def evolve(Psi0: Union[TwoComponentState, np.ndarray], spec: BCSpec, V=None, grid: Grid = None,
           dt: Optional[float] = None, n_steps: int = 1000, params: PhysicalParams = None,
           closed: Optional[ClosedHamiltonian] = None, e_cut: Optional[float] = None,
           real_modes_only: bool = False):
    """Advance ``Psi0`` by ``n_steps`` Crank-Nicolson steps.

    ``Psi0`` is a grid state (projected onto the closed subspace) or an
    already reduced vector. ``e_cut`` / ``real_modes_only`` additionally
    truncate it in the discrete eigenbasis. Returns ``(trace, z_final, closed)``.
    """
    p = params or (closed.params if closed is not None else natural_units())
    ch = closed or assemble_discrete_h(spec, grid, V, p)
    grid = ch.grid
    if dt is None:
        dt = default_dt(grid, p)
    z = _initial_z(Psi0, ch)
    if not np.all(np.isfinite(z)):
        raise ValueError("initial state is not finite")
    if e_cut is not None or real_modes_only:
        z = project_to_modes(ch, z, e_cut, real_modes_only)
    prop = CrankNicolson(ch, dt, p.hbar)
    rows = [_record(ch, z)]
    for k in range(1, n_steps + 1):
        z = prop.step(z)
        if not np.all(np.isfinite(z)):
            raise FloatingPointError(f"non-finite state at step {k}")
        rows.append(_record(ch, z))
    arr = np.array(rows, dtype=float)
    trace = EvolutionTrace(dt * np.arange(n_steps + 1), arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3],
                           meta={"dt": dt, "n_steps": n_steps, "certificate": ch.certificate})
    return trace, z, ch


@dataclass
class RateMonitor:
    times: np.ndarray
    inner: np.ndarray       # <<Psi, Phi>>(t)
    rate: np.ndarray        # centered difference, at times[1:-1]
    boundary: np.ndarray    # -(i hbar/2m)[psi_x* phi - psi* phi_x]_a^b at times[1:-1]

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.rate - self.boundary)))

    @property
    def max_rate(self) -> float:
        return float(np.max(np.abs(self.rate)))

    @property
    def max_boundary(self) -> float:
        return float(np.max(np.abs(self.boundary)))

    def inner_drift(self) -> float:
        return float(np.max(np.abs(self.inner - self.inner[0])))


def two_state_rate_monitor(Psi0, Phi0, spec: BCSpec, V=None, grid: Grid = None,
                           dt: Optional[float] = None, n_steps: int = 100,
                           params: PhysicalParams = None,
                           spec_phi: Optional[BCSpec] = None) -> RateMonitor:
    """Evolve two states and compare ``d/dt <<Psi, Phi>>`` with the boundary expression.

    With ``spec_phi`` the second state is closed by a different boundary
    condition (negative control): the boundary expression no longer vanishes.
    """
    p = params or natural_units()
    ch_psi = assemble_discrete_h(spec, grid, V, p)
    ch_phi = ch_psi if spec_phi is None else assemble_discrete_h(spec_phi, grid, V, p)
    if dt is None:
        dt = default_dt(grid, p)
    zp, zf = ch_psi.reduce(Psi0), ch_phi.reduce(Phi0)
    prop_psi = CrankNicolson(ch_psi, dt, p.hbar)
    prop_phi = prop_psi if spec_phi is None else CrankNicolson(ch_phi, dt, p.hbar)
    shared = spec_phi is None
    inner, bterm = [], []
    pref = -1j * p.hbar / (2 * p.mass)
    for k in range(n_steps + 1):
        if k:
            zp, zf = prop_psi.step(zp), prop_phi.step(zf)
        if shared:
            inner.append(ch_psi.pseudo_inner(zp, zf))
        else:
            inner.append(pseudo_inner(ch_psi.expand(zp), ch_phi.expand(zf), grid))
        bterm.append(pref * mixed_boundary_form(ch_psi.boundary_data(zp), ch_phi.boundary_data(zf), 1.0))
    inner = np.array(inner)
    times = dt * np.arange(n_steps + 1)
    rate = (inner[2:] - inner[:-2]) / (2 * dt)
    return RateMonitor(times, inner, rate, np.array(bterm)[1:-1])
