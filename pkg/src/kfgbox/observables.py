"""Sesquilinear quantities: the indefinite inner product and its relatives,
density, currents and the boundary term.

Integrals use the trapezoid rule, matching the second-order stencils used
everywhere else. Derivatives are ``np.gradient`` with ``edge_order=2``
(central inside, one-sided 3-point at the ends).
"""
from __future__ import annotations

from typing import Callable, Optional, Sequence, Union

import numpy as np

from .algebra import SZ, singular_projector
from .bc import mixed_boundary_form
from .core import (
    BoundaryData1,
    BoundaryData2,
    Grid,
    PhysicalParams,
    ScalarState,
    TwoComponentState,
    boundary_trace,
    natural_units,
)
from .fv import _potential_values

__all__ = [
    "pseudo_inner",
    "pseudo_norm",
    "dirac_inner",
    "kfg_inner",
    "density",
    "current_scalar",
    "current_fv",
    "boundary_current",
    "boundary_term_f",
    "boundary_term_forms",
    "boundary_term_scalar",
    "rate_identity_check",
    "FORM_TOL",
    "CURRENT_TOL",
]

FORM_TOL = 1e-12
CURRENT_TOL = 1e-12


def _check_len(grid: Grid, *states):
    for s in states:
        if len(s) != grid.n_points:
            raise ValueError("grid mismatch")


def pseudo_inner(Psi: TwoComponentState, Phi: TwoComponentState, grid: Grid) -> complex:
    """``<<Psi, Phi>> = int Psi^dag tau3 Phi dx``; indefinite."""
    _check_len(grid, Psi, Phi)
    integrand = np.conj(Psi.comp1) * Phi.comp1 - np.conj(Psi.comp2) * Phi.comp2
    return complex(np.dot(grid.trapezoid_weights(), integrand))


def pseudo_norm(Psi: TwoComponentState, grid: Grid) -> float:
    return pseudo_inner(Psi, Psi, grid).real


def dirac_inner(Psi: TwoComponentState, Phi: TwoComponentState, grid: Grid) -> complex:
    """The positive-definite ``int Psi^dag Phi dx``."""
    _check_len(grid, Psi, Phi)
    integrand = np.conj(Psi.comp1) * Phi.comp1 + np.conj(Psi.comp2) * Phi.comp2
    return complex(np.dot(grid.trapezoid_weights(), integrand))


def kfg_inner(s1: ScalarState, s2: ScalarState, V, grid: Grid) -> complex:
    """``(i hbar / 2 m c^2) int (psi* phi_t - psi_t* phi - (2V/i hbar) psi* phi) dx``."""
    _check_len(grid, s1, s2)
    p = s1.params
    v = _potential_values(V, grid.n_points, grid)
    integrand = (
        np.conj(s1.psi) * s2.psi_t
        - np.conj(s1.psi_t) * s2.psi
        - (2.0 * v / (1j * p.hbar)) * np.conj(s1.psi) * s2.psi
    )
    pref = 1j * p.hbar / (2.0 * p.rest_energy)
    return complex(pref * np.dot(grid.trapezoid_weights(), integrand))


def density(Psi: TwoComponentState) -> np.ndarray:
    """``|psi1|^2 - |psi2|^2``."""
    return np.abs(Psi.comp1) ** 2 - np.abs(Psi.comp2) ** 2


def _real_current(j: np.ndarray, scale: float) -> np.ndarray:
    if np.max(np.abs(j.imag), initial=0.0) > CURRENT_TOL * max(1.0, scale):
        raise ValueError("non-real current")
    return j.real


def current_scalar(s: Union[ScalarState, np.ndarray], grid: Grid,
                   params: PhysicalParams = None) -> np.ndarray:
    """``j = (i hbar / 2m)(psi_x* psi - psi* psi_x)`` at every grid point."""
    if isinstance(s, ScalarState):
        psi, p = s.psi, params or s.params
    else:
        psi, p = np.asarray(s, dtype=complex), params or natural_units()
    if grid.n_points < 4:
        raise ValueError("insufficient points for boundary stencil")
    _check_len(grid, psi)
    psi_x = np.gradient(psi, grid.spacing, edge_order=2)
    j = (1j * p.hbar / (2 * p.mass)) * (np.conj(psi_x) * psi - np.conj(psi) * psi_x)
    return _real_current(j, float(np.max(np.abs(psi) * np.abs(psi_x), initial=0.0)))


def current_fv(Psi: TwoComponentState, grid: Grid, params: PhysicalParams = None) -> np.ndarray:
    """Current from ``P Psi`` and ``P Psi_x`` only."""
    p = params or natural_units()
    if grid.n_points < 4:
        raise ValueError("insufficient points for boundary stencil")
    _check_len(grid, Psi)
    P = singular_projector()
    arr = Psi.stacked()
    PPsi = P @ arr
    PPsi_x = P @ np.gradient(arr, grid.spacing, axis=1, edge_order=2)
    bracket = np.sum(np.conj(PPsi_x) * PPsi - np.conj(PPsi) * PPsi_x, axis=0)
    j = (1j * p.hbar / (2 * p.mass)) * 0.5 * bracket
    return _real_current(j, float(np.max(np.abs(PPsi) * np.abs(PPsi_x), initial=0.0)))


def boundary_current(data: BoundaryData1, params: PhysicalParams = None) -> tuple[float, float]:
    """``(j(a), j(b))`` from endpoint data."""
    p = params or natural_units()
    k = 1j * p.hbar / (2 * p.mass)
    ja = k * (np.conj(data.dpsi_a) * data.psi_a - np.conj(data.psi_a) * data.dpsi_a)
    jb = k * (np.conj(data.dpsi_b) * data.psi_b - np.conj(data.psi_b) * data.dpsi_b)
    return float(ja.real), float(jb.real)


def _as_fv_data(x, grid: Optional[Grid]) -> BoundaryData2:
    if isinstance(x, BoundaryData2):
        return x
    if isinstance(x, TwoComponentState):
        if grid is None:
            raise ValueError("a grid is needed to take boundary traces")
        return boundary_trace(x, grid)
    raise TypeError(f"cannot take two-component boundary data from {type(x).__name__}")


def boundary_term_forms(Xi, Phi, grid: Grid = None,
                        params: PhysicalParams = None) -> tuple[complex, complex, float]:
    """Boundary term of ``<<Xi, h Phi>>`` evaluated two ways.

    Returns ``(plain, projected, scale)``: the form
    ``Xi_x^dag tau3 P Phi - Xi^dag tau3 P Phi_x``, the form built from
    ``P``-multiplied vectors only, and the size of the terms entering them.
    """
    p = params or natural_units()
    X, F = _as_fv_data(Xi, grid), _as_fv_data(Phi, grid)
    P = singular_projector()
    T3P = SZ @ P

    def plain(xv, xd, fv, fd):
        return np.vdot(xd, T3P @ fv) - np.vdot(xv, T3P @ fd)

    def projected(xv, xd, fv, fd):
        return 0.5 * (np.vdot(P @ xd, P @ fv) - np.vdot(P @ xv, P @ fd))

    pref = p.hbar**2 / (2 * p.mass)
    f_plain = pref * (plain(X.Psi_b, X.dPsi_b, F.Psi_b, F.dPsi_b)
                      - plain(X.Psi_a, X.dPsi_a, F.Psi_a, F.dPsi_a))
    f_proj = pref * (projected(X.Psi_b, X.dPsi_b, F.Psi_b, F.dPsi_b)
                     - projected(X.Psi_a, X.dPsi_a, F.Psi_a, F.dPsi_a))
    nx = max(np.linalg.norm(v) for v in (X.Psi_a, X.Psi_b, X.dPsi_a, X.dPsi_b))
    nf = max(np.linalg.norm(v) for v in (F.Psi_a, F.Psi_b, F.dPsi_a, F.dPsi_b))
    return complex(f_plain), complex(f_proj), float(pref * max(1.0, nx * nf))


def boundary_term_f(Xi, Phi, grid: Grid = None, params: PhysicalParams = None,
                    tol: float = FORM_TOL) -> complex:
    """Boundary term of the integration by parts of ``<<Xi, h Phi>>``.

    Both forms of :func:`boundary_term_forms` must agree (relative to the
    size of the terms) or ``ArithmeticError`` is raised.
    """
    f_plain, f_proj, scale = boundary_term_forms(Xi, Phi, grid, params)
    if abs(f_plain - f_proj) > tol * scale:
        raise ArithmeticError(f"boundary-term forms disagree by {abs(f_plain - f_proj):.3e}")
    return f_proj


def boundary_term_scalar(xi: BoundaryData1, phi: BoundaryData1,
                         params: PhysicalParams = None) -> complex:
    """``(hbar^2/2m) [xi_x* phi - xi* phi_x]`` from a to b."""
    p = params or natural_units()
    # mixed_boundary_form carries one factor of lambda; use lambda = 1
    return complex(p.hbar**2 / (2 * p.mass) * mixed_boundary_form(xi, phi, 1.0))


def rate_identity_check(
    psi_series: Sequence,
    phi_series: Sequence,
    times: Sequence[float],
    grid: Grid,
    V=None,
    params: PhysicalParams = None,
    boundary_data: Optional[Callable[[object], BoundaryData1]] = None,
) -> dict:
    """Compare ``d/dt <<Psi, Phi>>`` with ``-(i hbar/2m)[psi_x* phi - psi* phi_x]_a^b``.

    The series may hold :class:`TwoComponentState` or :class:`ScalarState`
    samples at equally spaced ``times``; the rate is a centered difference.
    ``boundary_data`` maps a sample to its endpoint data (defaults to
    one-sided stencils on ``psi``).

    Returns the rate, the boundary expression and the max mismatch.
    """
    p = params or natural_units()
    t = np.asarray(times, dtype=float)
    if len(psi_series) != len(t) or len(phi_series) != len(t) or len(t) < 3:
        raise ValueError("need at least three equally spaced samples per series")

    def inner(a, b):
        if isinstance(a, ScalarState):
            return kfg_inner(a, b, V, grid)
        return pseudo_inner(a, b, grid)

    def bdata(s):
        if boundary_data is not None:
            return boundary_data(s)
        return boundary_trace(s.psi if isinstance(s, TwoComponentState) else s, grid)

    ip = np.array([inner(a, b) for a, b in zip(psi_series, phi_series)])
    rate = (ip[2:] - ip[:-2]) / (t[2:] - t[:-2])
    bterm = np.array([
        -(1j * p.hbar / (2 * p.mass)) * mixed_boundary_form(bdata(a), bdata(b), 1.0)
        for a, b in zip(psi_series[1:-1], phi_series[1:-1])
    ])
    return {
        "rate": rate,
        "boundary": bterm,
        "inner": ip,
        "residual": float(np.max(np.abs(rate - bterm))),
    }
