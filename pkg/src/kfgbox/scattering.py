"""Stationary scattering of a unit incident wave on the step ``V(x) = V0 Theta(x)``.

The scalar field ``psi`` and ``psi_x`` are continuous at the interface (the
periodic member of the family with the walls glued together at ``x = 0``).
The two-component field built from them is not: ``Psi`` and ``Psi_x`` jump,
while ``P Psi`` and ``P Psi_x`` do not.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .algebra import singular_projector
from .core import PhysicalParams, ScalarState, natural_units
from .fv import to_fv

__all__ = ["ScatterResult", "step_scatter", "fv_jump_report", "scatter_sweep", "sweep_to_csv",
           "THRESHOLD_TOL"]

THRESHOLD_TOL = 1e-12


@dataclass(frozen=True)
class ScatterResult:
    E: float
    V0: float
    k: float
    k_prime: complex
    r: complex
    t: complex
    regime: str                 # propagating | klein | evanescent | threshold
    Psi_minus: np.ndarray       # Psi(0-)
    Psi_plus: np.ndarray        # Psi(0+)
    dPsi_minus: np.ndarray
    dPsi_plus: np.ndarray
    current_minus: float
    current_plus: float
    params: PhysicalParams

    @property
    def degenerate(self) -> bool:
        return self.regime == "threshold"

    @property
    def jump_Psi(self) -> np.ndarray:
        return self.Psi_plus - self.Psi_minus

    @property
    def jump_dPsi(self) -> np.ndarray:
        return self.dPsi_plus - self.dPsi_minus

    @property
    def jump_PPsi(self) -> np.ndarray:
        return singular_projector() @ self.jump_Psi

    @property
    def jump_PdPsi(self) -> np.ndarray:
        return singular_projector() @ self.jump_dPsi

    @property
    def current_mismatch(self) -> float:
        return abs(self.current_minus - self.current_plus)

    @property
    def flux_residual(self) -> float:
        """``|k (1 - |r|^2) - Re(k') |t|^2|``."""
        return abs(self.k * (1 - abs(self.r) ** 2) - self.k_prime.real * abs(self.t) ** 2)


def _transmitted_k(E, V0, p: PhysicalParams):
    hc = p.hbar * p.light_speed
    s = ((E - V0) ** 2 - p.rest_energy**2) / hc**2
    if abs(s) <= THRESHOLD_TOL * max(1.0, (E - V0) ** 2 / hc**2):
        return 0j, "threshold"
    if s > 0:
        if E - V0 < -p.rest_energy:
            # negative kinetic energy: the right-moving packet has negative phase velocity
            return complex(-np.sqrt(s)), "klein"
        return complex(np.sqrt(s)), "propagating"
    return 1j * np.sqrt(-s), "evanescent"


def _current(psi, dpsi, p: PhysicalParams) -> float:
    return float((p.hbar / p.mass) * np.imag(np.conj(psi) * dpsi))


def _fv_point(psi, dpsi, E, V, p: PhysicalParams):
    """Psi and Psi_x at one point for a stationary state of energy E."""
    dt = -1j * E / p.hbar
    val = to_fv(ScalarState(np.array([psi]), np.array([dt * psi]), p), V=V)
    der = to_fv(ScalarState(np.array([dpsi]), np.array([dt * dpsi]), p), V=V)
    return val.stacked()[:, 0], der.stacked()[:, 0]


def step_scatter(E: float, V0: float, params: PhysicalParams = None) -> ScatterResult:
    """Match ``exp(ikx) + r exp(-ikx)`` (x < 0) to ``t exp(ik'x)`` (x > 0)."""
    p = params or natural_units()
    if not (np.isfinite(E) and np.isfinite(V0)):
        raise ValueError("energy and step height must be finite")
    if E <= p.rest_energy:
        raise ValueError("incident energy must exceed m c^2")
    k = np.sqrt(E**2 - p.rest_energy**2) / (p.hbar * p.light_speed)
    kp, regime = _transmitted_k(E, V0, p)
    r = (k - kp) / (k + kp)
    t = 2 * k / (k + kp)
    psi_m, dpsi_m = 1 + r, 1j * k * (1 - r)
    psi_p, dpsi_p = t, 1j * kp * t
    Pm, dPm = _fv_point(psi_m, dpsi_m, E, 0.0, p)
    Pp, dPp = _fv_point(psi_p, dpsi_p, E, V0, p)
    return ScatterResult(
        float(E), float(V0), float(k), complex(kp), complex(r), complex(t), regime,
        Pm, Pp, dPm, dPp, _current(psi_m, dpsi_m, p), _current(psi_p, dpsi_p, p), p,
    )


def fv_jump_report(res: ScatterResult) -> dict:
    """Component relations across the interface.

    ``psi1 + psi2`` is continuous on both sides; ``psi1 - psi2`` equals
    ``(E - V) psi / m c^2`` on each side, so its ratio across the step is
    ``(E - V0) / E``.
    """
    mc2 = res.params.rest_energy
    s_m, s_p = res.Psi_minus.sum(), res.Psi_plus.sum()
    d_m = res.Psi_minus[0] - res.Psi_minus[1]
    d_p = res.Psi_plus[0] - res.Psi_plus[1]
    ds_m, ds_p = res.dPsi_minus.sum(), res.dPsi_plus.sum()
    dd_m = res.dPsi_minus[0] - res.dPsi_minus[1]
    dd_p = res.dPsi_plus[0] - res.dPsi_plus[1]
    expected = (res.E - res.V0) / res.E
    return {
        "sum_minus": complex(s_m),
        "sum_plus": complex(s_p),
        "sum_jump": abs(s_p - s_m),
        "diff_minus": complex(d_m),
        "diff_plus": complex(d_p),
        "diff_ratio": complex(d_p / d_m) if d_m != 0 else None,
        "expected_ratio": expected,
        "scale_minus": res.E / mc2,
        "scale_plus": (res.E - res.V0) / mc2,
        "diff_scale_residual": max(abs(d_m - res.E / mc2 * s_m),
                                   abs(d_p - (res.E - res.V0) / mc2 * s_p)),
        "dsum_jump": abs(ds_p - ds_m),
        "ddiff_ratio": complex(dd_p / dd_m) if dd_m != 0 else None,
        "regime": res.regime,
    }


def scatter_sweep(energies: Iterable[float], V0: float, params: Optional[PhysicalParams] = None):
    return [step_scatter(E, V0, params) for E in energies]


def sweep_to_csv(results, fmt: str = "%.12e", header: Optional[list[str]] = None) -> str:
    buf = io.StringIO()
    for line in header or []:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["E", "Re_r", "Im_r", "Re_t", "Im_t", "abs_jump_Psi", "current_mismatch", "flag"])
    for res in results:
        w.writerow([fmt % res.E, fmt % res.r.real, fmt % res.r.imag, fmt % res.t.real, fmt % res.t.imag,
                    fmt % np.linalg.norm(res.jump_Psi), fmt % res.current_mismatch,
                    "degenerate" if res.degenerate else res.regime])
    return buf.getvalue()
