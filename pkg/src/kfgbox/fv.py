"""Maps between the one-component and two-component pictures, and the
finite-difference action of the Hamiltonian ``h`` and of ``d = -c^2 d_xx + tau^-2``.

The operators act on the whole grid with second-order central differences in
the interior. The two boundary rows use a one-sided second-derivative stencil
and are *not* closed by any boundary condition; that is the job of
:mod:`kfgbox.spectral`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import SY, SZ, singular_projector
from .core import Grid, PhysicalParams, Potential, ScalarState, TwoComponentState, natural_units

__all__ = [
    "OperatorApplication",
    "to_fv",
    "from_fv",
    "second_difference",
    "apply_h",
    "apply_h_adj",
    "apply_d",
    "apply_h_via_d",
    "h_from_d_identity",
]


@dataclass(frozen=True)
class OperatorApplication:
    result: Union[TwoComponentState, np.ndarray]
    interior_only: bool = True

    def interior(self) -> np.ndarray:
        r = self.result
        arr = r.stacked() if isinstance(r, TwoComponentState) else np.asarray(r)
        return arr[..., 1:-1]


def _potential_values(V, n: int, grid: Grid = None) -> np.ndarray:
    if V is None:
        return np.zeros(n)
    if isinstance(V, Potential):
        if V.kind != "tabulated" and grid is None:
            if V.kind == "constant":
                return np.full(n, V.V0)
            raise ValueError("a grid is needed to sample a step potential")
        return V.values(grid)
    v = np.asarray(V, dtype=float)
    return np.full(n, float(v)) if v.ndim == 0 else v


def to_fv(s: ScalarState, V=None, grid: Grid = None) -> TwoComponentState:
    """``psi1, psi2 = (1/2)[psi +/- i tau (psi_t - V psi / (i hbar))]``."""
    p = s.params
    V = s.potential if V is None else V
    v = _potential_values(V, len(s.psi), grid)
    chi = 1j * p.tau * (s.psi_t - v * s.psi / (1j * p.hbar))
    return TwoComponentState(0.5 * (s.psi + chi), 0.5 * (s.psi - chi))


def from_fv(Psi: TwoComponentState, V=None, params: PhysicalParams = None,
            grid: Grid = None) -> ScalarState:
    """``psi = psi1 + psi2`` and ``psi_t = [m c^2 (psi1 - psi2) + V psi] / (i hbar)``."""
    p = params or natural_units()
    v = _potential_values(V, len(Psi), grid)
    psi = Psi.comp1 + Psi.comp2
    psi_t = (p.rest_energy * (Psi.comp1 - Psi.comp2) + v * psi) / (1j * p.hbar)
    return ScalarState(psi, psi_t, p, V if isinstance(V, Potential) else None)


def second_difference(f: np.ndarray, h: float) -> np.ndarray:
    """Central second difference along the last axis; one-sided 4-point rows at the ends."""
    f = np.asarray(f)
    if f.shape[-1] < 4:
        raise ValueError("need at least 4 points")
    out = np.empty_like(f, dtype=np.result_type(f, float))
    out[..., 1:-1] = (f[..., :-2] - 2.0 * f[..., 1:-1] + f[..., 2:]) / h**2
    out[..., 0] = (2.0 * f[..., 0] - 5.0 * f[..., 1] + 4.0 * f[..., 2] - f[..., 3]) / h**2
    out[..., -1] = (2.0 * f[..., -1] - 5.0 * f[..., -2] + 4.0 * f[..., -3] - f[..., -4]) / h**2
    return out


def _apply_local(K: np.ndarray, Psi: TwoComponentState, V, grid: Grid,
                 params: PhysicalParams) -> OperatorApplication:
    p = params
    arr = Psi.stacked()
    if arr.shape[1] != grid.n_points:
        raise ValueError("state does not match grid")
    v = _potential_values(V, grid.n_points, grid)
    kin = -(p.hbar**2 / (2 * p.mass)) * (K @ second_difference(arr, grid.spacing))
    out = kin + p.rest_energy * (SZ @ arr) + v * arr
    return OperatorApplication(TwoComponentState.from_stacked(out), True)


def apply_h(Psi: TwoComponentState, V, grid: Grid,
            params: PhysicalParams = None) -> OperatorApplication:
    """``h Psi = -(hbar^2/2m) P Psi_xx + m c^2 tau3 Psi + V Psi``."""
    return _apply_local(singular_projector(), Psi, V, grid, params or natural_units())


def apply_h_adj(Psi: TwoComponentState, V, grid: Grid,
                params: PhysicalParams = None) -> OperatorApplication:
    """Formal generalized adjoint ``tau3 h^dagger tau3`` (kinetic matrix ``tau3 P^dag tau3``)."""
    P = singular_projector()
    return _apply_local(SZ @ P.conj().T @ SZ, Psi, V, grid, params or natural_units())


def apply_d(psi, grid: Grid, params: PhysicalParams = None) -> OperatorApplication:
    p = params or natural_units()
    psi = np.asarray(psi)
    out = -p.light_speed**2 * second_difference(psi, grid.spacing) + psi / p.tau**2
    return OperatorApplication(out, True)


def apply_h_via_d(Psi: TwoComponentState, V, grid: Grid,
                  params: PhysicalParams = None) -> OperatorApplication:
    """``(hbar tau/2) P d + (hbar/2) tau^-1 (tau3 - i tau2) + V``, componentwise."""
    p = params or natural_units()
    arr = Psi.stacked()
    v = _potential_values(V, grid.n_points, grid)
    P = singular_projector()
    Q = SZ - 1j * SY
    d_arr = np.vstack([apply_d(arr[0], grid, p).result, apply_d(arr[1], grid, p).result])
    out = 0.5 * p.hbar * p.tau * (P @ d_arr) + 0.5 * p.hbar / p.tau * (Q @ arr) + v * arr
    return OperatorApplication(TwoComponentState.from_stacked(out), True)


def h_from_d_identity(Psi: TwoComponentState, V, grid: Grid,
                      params: PhysicalParams = None) -> float:
    """Max interior difference between :func:`apply_h` and :func:`apply_h_via_d`."""
    direct = apply_h(Psi, V, grid, params).interior()
    composed = apply_h_via_d(Psi, V, grid, params).interior()
    return float(np.max(np.abs(direct - composed)))
