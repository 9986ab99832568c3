"""The four-parameter family of pseudo self-adjoint boundary conditions.

A member is fixed by a 2x2 unitary ``U`` and a length ``lam``. In terms of the
one-component field it reads::

    [psi(b) - i lam psi_x(b)]       [psi(b) + i lam psi_x(b)]
    [psi(a) + i lam psi_x(a)]  = U  [psi(a) - i lam psi_x(a)]

and in terms of the two-component field it is stated on ``P Psi`` and
``P Psi_x`` only, with ``P = tau3 + i tau2`` and the 4x4 matrix
``S^dag (1 (x) U) S``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import (
    ID2,
    SX,
    SZ,
    USER_UNITARY_TOL,
    kron,
    s_matrix,
    singular_projector,
    unitarity_defect,
)
from .core import BoundaryData1, BoundaryData2, PhysicalParams, natural_units

__all__ = [
    "BCSpec",
    "BoundaryData1",
    "BoundaryData2",
    "PRESETS",
    "PRESET_PARAMS",
    "LIFTED_PRESETS",
    "preset",
    "cayley_vectors",
    "residual2",
    "lift_to_u4",
    "residual4",
    "is_confining",
    "boundary_data_from_bc",
    "boundary_data_from_relation",
    "boundary_form",
    "mixed_boundary_form",
    "mixed_boundary_form_cayley",
    "fv_boundary_data",
    "CONFINING_TOL",
]

CONFINING_TOL = 1e-12

PRESETS = {
    "dirichlet": -ID2,
    "neumann": ID2,
    "periodic": SX,
    "antiperiodic": -SX,
    "mixed_ab": SZ,
    "mixed_ba": -SZ,
    "robin_mit": 1j * ID2,
}

# (mu, n0, n1, n2, n3) reaching each preset through u2_from_params
PRESET_PARAMS = {
    "dirichlet": (np.pi, 1, 0, 0, 0),
    "neumann": (0.0, 1, 0, 0, 0),
    "periodic": (-np.pi / 2, 0, 1, 0, 0),
    "antiperiodic": (np.pi / 2, 0, 1, 0, 0),
    "mixed_ab": (-np.pi / 2, 0, 0, 0, 1),
    "mixed_ba": (np.pi / 2, 0, 0, 0, 1),
    "robin_mit": (np.pi / 2, 1, 0, 0, 0),
}

# expected 4x4 lifts of the presets
LIFTED_PRESETS = {
    "dirichlet": -kron(ID2, ID2),
    "neumann": kron(ID2, ID2),
    "periodic": kron(SX, ID2),
    "antiperiodic": -kron(SX, ID2),
    "mixed_ab": kron(SZ, ID2),
    "mixed_ba": -kron(SZ, ID2),
    "robin_mit": 1j * kron(ID2, ID2),
}


@dataclass(frozen=True)
class BCSpec:
    """One member of the family: unitary ``u2``, length ``lam`` and interval."""

    u2: np.ndarray
    lam: float
    interval: tuple[float, float] = (0.0, 1.0)
    name: Optional[str] = None

    def __post_init__(self):
        u2 = np.array(self.u2, dtype=complex, copy=True)
        if u2.shape != (2, 2) or not np.all(np.isfinite(u2)):
            raise ValueError("boundary matrix must be a finite 2x2 matrix")
        if unitarity_defect(u2) > USER_UNITARY_TOL:
            raise ValueError("boundary matrix not unitary")
        lam = float(self.lam)
        if not np.isfinite(lam) or lam <= 0:
            raise ValueError("lambda must be positive")
        a, b = (float(v) for v in self.interval)
        if not a < b:
            raise ValueError("interval requires a < b")
        u2.setflags(write=False)
        object.__setattr__(self, "u2", u2)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "interval", (a, b))

    @property
    def m_matrix(self) -> np.ndarray:
        """The matrix of the reversed orientation, ``U^-1``."""
        return self.u2.conj().T

    def to_dict(self) -> dict:
        d = {
            "u2": [[float(z.real), float(z.imag)] for z in self.u2.ravel()],
            "lambda": self.lam,
            "interval": list(self.interval),
        }
        if self.name:
            d["preset"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict, params: Optional[PhysicalParams] = None,
                  interval=(0.0, 1.0)) -> "BCSpec":
        """Accepts ``{"preset": name}`` or ``{"u2": [[re, im] x 4], "lambda": x}``."""
        interval = tuple(d.get("interval", interval))
        if "preset" in d and "u2" not in d:
            return preset(d["preset"], params=params, lam=d.get("lambda"), interval=interval)
        if "u2" not in d:
            raise ValueError("boundary condition needs 'preset' or 'u2'")
        entries = np.asarray(d["u2"], dtype=float)
        if entries.shape != (4, 2):
            raise ValueError("u2 must be four [re, im] pairs in row-major order")
        u2 = (entries[:, 0] + 1j * entries[:, 1]).reshape(2, 2)
        lam = d.get("lambda")
        if lam is None:
            lam = (params or natural_units()).compton
        return cls(u2, lam, interval)


def preset(name: str, params: Optional[PhysicalParams] = None, lam: Optional[float] = None,
           interval=(0.0, 1.0)) -> BCSpec:
    """Named family member. ``lam`` defaults to the Compton wavelength."""
    try:
        u2 = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
    if lam is None:
        lam = (params or natural_units()).compton
    return BCSpec(u2, lam, interval, name)


def cayley_vectors(data: BoundaryData1, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """``(L, R)`` with L = [psi(b) - i lam psi_x(b), psi(a) + i lam psi_x(a)]
    and R = [psi(b) + i lam psi_x(b), psi(a) - i lam psi_x(a)]."""
    L = np.array([data.psi_b - 1j * lam * data.dpsi_b, data.psi_a + 1j * lam * data.dpsi_a])
    R = np.array([data.psi_b + 1j * lam * data.dpsi_b, data.psi_a - 1j * lam * data.dpsi_a])
    return L, R


def residual2(data: BoundaryData1, spec: BCSpec) -> np.ndarray:
    L, R = cayley_vectors(data, spec.lam)
    return L - spec.u2 @ R


def lift_to_u4(spec_or_u2) -> np.ndarray:
    """``S^dag (1 (x) U) S``."""
    u2 = spec_or_u2.u2 if isinstance(spec_or_u2, BCSpec) else np.asarray(spec_or_u2, dtype=complex)
    S = s_matrix()
    return S.conj().T @ kron(ID2, u2) @ S


def residual4(data: BoundaryData2, spec: BCSpec) -> np.ndarray:
    """Residual of the 4-component condition, built from ``P``-multiplied blocks.

    ``P`` is never inverted; the 2-vectors ``P Psi`` and ``P Psi_x`` are all
    that enter.
    """
    P = singular_projector()
    lam = spec.lam
    minus_b = P @ (data.Psi_b - 1j * lam * data.dPsi_b)
    plus_b = P @ (data.Psi_b + 1j * lam * data.dPsi_b)
    minus_a = P @ (data.Psi_a - 1j * lam * data.dPsi_a)
    plus_a = P @ (data.Psi_a + 1j * lam * data.dPsi_a)
    L4 = np.concatenate([minus_b, plus_a])
    R4 = np.concatenate([plus_b, minus_a])
    return L4 - lift_to_u4(spec) @ R4


def is_confining(spec_or_u2, tol: float = CONFINING_TOL) -> bool:
    """Diagonal boundary matrix, i.e. zero current at each wall."""
    u2 = spec_or_u2.u2 if isinstance(spec_or_u2, BCSpec) else np.asarray(spec_or_u2)
    return bool(abs(u2[0, 1]) <= tol and abs(u2[1, 0]) <= tol)


def _data_from_cayley(L, R, lam: float) -> BoundaryData1:
    if not np.isfinite(lam) or lam == 0:
        raise ValueError("lambda = 0 makes the boundary map singular")
    psi_b = 0.5 * (R[0] + L[0])
    dpsi_b = (R[0] - L[0]) / (2j * lam)
    psi_a = 0.5 * (R[1] + L[1])
    dpsi_a = (L[1] - R[1]) / (2j * lam)
    return BoundaryData1(psi_a, psi_b, dpsi_a, dpsi_b)


def boundary_data_from_bc(spec: BCSpec, free) -> BoundaryData1:
    """Boundary data satisfying ``spec``: take ``R = free`` and ``L = U R``."""
    R = np.asarray(free, dtype=complex).reshape(2)
    return _data_from_cayley(spec.u2 @ R, R, spec.lam)


def boundary_data_from_relation(M, free, lam: float) -> BoundaryData1:
    """Boundary data obeying the reversed-orientation relation with any matrix ``M``:

    [psi(b) + i lam psi_x(b); psi(a) - i lam psi_x(a)] = M [psi(b) - i lam psi_x(b); ...]

    ``M`` need not be unitary; used as a negative control.
    """
    L = np.asarray(free, dtype=complex).reshape(2)
    R = np.asarray(M, dtype=complex) @ L
    return _data_from_cayley(L, R, lam)


def mixed_boundary_form(xi: BoundaryData1, phi: BoundaryData1, lam: float) -> complex:
    """``[phi lam xi_x* - xi* lam phi_x]`` evaluated from a to b."""
    at_b = phi.psi_b * lam * np.conj(xi.dpsi_b) - np.conj(xi.psi_b) * lam * phi.dpsi_b
    at_a = phi.psi_a * lam * np.conj(xi.dpsi_a) - np.conj(xi.psi_a) * lam * phi.dpsi_a
    return complex(at_b - at_a)


def mixed_boundary_form_cayley(xi: BoundaryData1, phi: BoundaryData1, lam: float) -> complex:
    """Same quantity rewritten through the Cayley vectors of both fields."""
    Lx, Rx = cayley_vectors(xi, lam)
    Lp, Rp = cayley_vectors(phi, lam)
    return complex(0.5j * (np.vdot(Rx, Rp) - np.vdot(Lx, Lp)))


def boundary_form(data: BoundaryData1, lam: float) -> complex:
    """``[psi lam psi_x* - psi* lam psi_x]`` from a to b; zero for every family member."""
    return mixed_boundary_form(data, data, lam)


def fv_boundary_data(data: BoundaryData1, chi: Optional[BoundaryData1] = None) -> BoundaryData2:
    """Two-component boundary data with ``psi1 + psi2 = psi``.

    ``chi`` supplies ``psi1 - psi2`` and its derivative (zero when omitted);
    any choice is compatible with the scalar data since ``P Psi`` depends on
    ``psi`` alone.
    """
    chi = chi or BoundaryData1(0, 0, 0, 0)

    def split(s, d):
        return np.array([0.5 * (s + d), 0.5 * (s - d)])

    return BoundaryData2(
        split(data.psi_a, chi.psi_a),
        split(data.psi_b, chi.psi_b),
        split(data.dpsi_a, chi.dpsi_a),
        split(data.dpsi_b, chi.dpsi_b),
    )
