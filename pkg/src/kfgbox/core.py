"""Physical parameters, grids, potentials and the two state representations.

Everything here is an immutable value type. Arrays are copied on construction
and marked read-only so that states can be shared between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

__all__ = [
    "PhysicalParams",
    "natural_units",
    "Grid",
    "Potential",
    "ScalarState",
    "TwoComponentState",
    "BoundaryData1",
    "BoundaryData2",
    "boundary_trace",
    "one_sided_derivatives",
]


def _frozen(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhysicalParams:
    """Mass ``m``, speed of light ``c`` and ``hbar``.

    ``tau`` (= hbar / m c^2) and ``compton`` (= c tau) are derived.
    """

    mass: float = 1.0
    light_speed: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "light_speed", "hbar"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def tau(self) -> float:
        return self.hbar / (self.mass * self.light_speed**2)

    @property
    def compton(self) -> float:
        return self.light_speed * self.tau

    @property
    def rest_energy(self) -> float:
        return self.mass * self.light_speed**2

    def to_dict(self) -> dict:
        return {"mass": self.mass, "light_speed": self.light_speed, "hbar": self.hbar}


def natural_units() -> PhysicalParams:
    return PhysicalParams(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [a, b] including both endpoints."""

    a: float
    b: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.a >= self.b:
            raise ValueError(f"grid requires a < b, got a={self.a}, b={self.b}")
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ValueError(f"grid needs at least 3 points, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (self.n_points - 1)

    h = spacing

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def x(self) -> np.ndarray:
        x = np.linspace(self.a, self.b, self.n_points)
        x[0], x[-1] = self.a, self.b
        return x

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "n_points": self.n_points}


@dataclass(frozen=True)
class Potential:
    """Real electric potential: constant, step ``V0*Theta(x - x_s)`` or tabulated.

    A step keeps its two one-sided limits; on a grid node sitting exactly at
    the step the sampled value is their mean.
    """

    kind: str = "constant"
    V0: float = 0.0
    x_step: float = 0.0
    table: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("constant", "step", "tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated potential needs values")
            t = np.asarray(self.table)
            if np.iscomplexobj(t) and np.any(t.imag != 0):
                raise ValueError("potential must be real-valued")
            object.__setattr__(self, "table", _frozen(np.real(t), float))
        elif not np.isfinite(self.V0):
            raise ValueError("potential must be finite")

    @classmethod
    def constant(cls, V0: float = 0.0) -> "Potential":
        return cls("constant", float(V0))

    @classmethod
    def step(cls, V0: float, x_step: float = 0.0) -> "Potential":
        return cls("step", float(V0), float(x_step))

    @classmethod
    def tabulated(cls, values) -> "Potential":
        return cls("tabulated", table=np.asarray(values))

    @property
    def is_zero(self) -> bool:
        if self.kind == "tabulated":
            return bool(np.all(self.table == 0))
        return self.V0 == 0

    def limits(self, x: float) -> tuple[float, float]:
        """One-sided limits ``(V(x-), V(x+))`` for constant/step kinds."""
        if self.kind == "constant":
            return self.V0, self.V0
        if self.kind == "step":
            left = self.V0 if x > self.x_step else 0.0
            right = self.V0 if x >= self.x_step else 0.0
            return left, right
        raise ValueError("one-sided limits are not defined for tabulated potentials")

    def segments(self, a: float, b: float) -> list[tuple[float, float, float]]:
        """Piecewise-constant decomposition of [a, b] as ``(start, end, value)``."""
        if self.kind == "constant":
            return [(a, b, self.V0)]
        if self.kind == "step":
            if self.x_step <= a:
                return [(a, b, self.V0)]
            if self.x_step >= b:
                return [(a, b, 0.0)]
            return [(a, self.x_step, 0.0), (self.x_step, b, self.V0)]
        raise ValueError("tabulated potentials are not piecewise constant")

    def values(self, grid: Grid) -> np.ndarray:
        if self.kind == "constant":
            return np.full(grid.n_points, self.V0)
        if self.kind == "step":
            x = grid.x
            v = np.where(x > self.x_step, self.V0, 0.0)
            v[np.isclose(x, self.x_step, rtol=0, atol=1e-12 * grid.length)] = 0.5 * self.V0
            return v
        if self.table.shape != (grid.n_points,):
            raise ValueError("tabulated potential does not match the grid")
        return np.array(self.table)

    def to_dict(self) -> dict:
        if self.kind == "tabulated":
            return {"kind": "tabulated", "values": self.table.tolist()}
        if self.kind == "step":
            return {"kind": "step", "V0": self.V0, "x_step": self.x_step}
        return {"kind": "constant", "V0": self.V0}


@dataclass(frozen=True)
class ScalarState:
    """One-component data ``(psi, psi_t)`` on a grid."""

    psi: np.ndarray
    psi_t: np.ndarray
    params: PhysicalParams = field(default_factory=natural_units)
    potential: Optional[Potential] = None

    def __post_init__(self):
        psi, psi_t = _frozen(self.psi), _frozen(self.psi_t)
        if psi.ndim != 1 or psi.shape != psi_t.shape:
            raise ValueError("psi and psi_t must be 1D arrays of equal length")
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(psi_t))):
            raise ValueError("state has non-finite entries")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "psi_t", psi_t)

    def __len__(self):
        return len(self.psi)


@dataclass(frozen=True)
class TwoComponentState:
    """Two-component column ``[psi1, psi2]`` sampled on a grid."""

    comp1: np.ndarray
    comp2: np.ndarray

    def __post_init__(self):
        c1, c2 = _frozen(self.comp1), _frozen(self.comp2)
        if c1.ndim != 1 or c1.shape != c2.shape:
            raise ValueError("components must be 1D arrays of equal length")
        if not (np.all(np.isfinite(c1)) and np.all(np.isfinite(c2))):
            raise ValueError("state has non-finite entries")
        object.__setattr__(self, "comp1", c1)
        object.__setattr__(self, "comp2", c2)

    @classmethod
    def from_stacked(cls, arr) -> "TwoComponentState":
        arr = np.asarray(arr)
        return cls(arr[0], arr[1])

    def stacked(self) -> np.ndarray:
        """Array of shape (2, n)."""
        return np.vstack([self.comp1, self.comp2])

    @property
    def psi(self) -> np.ndarray:
        """The one-component field ``psi1 + psi2``."""
        return self.comp1 + self.comp2

    def __len__(self):
        return len(self.comp1)


@dataclass(frozen=True)
class BoundaryData1:
    """Endpoint values and derivatives of a one-component field."""

    psi_a: complex
    psi_b: complex
    dpsi_a: complex
    dpsi_b: complex

    def __post_init__(self):
        vals = [complex(v) for v in (self.psi_a, self.psi_b, self.dpsi_a, self.dpsi_b)]
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("boundary data must be finite")
        for name, v in zip(("psi_a", "psi_b", "dpsi_a", "dpsi_b"), vals):
            object.__setattr__(self, name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.psi_a, self.psi_b, self.dpsi_a, self.dpsi_b])


@dataclass(frozen=True)
class BoundaryData2:
    """Endpoint values and derivatives of a two-component field (2-vectors)."""

    Psi_a: np.ndarray
    Psi_b: np.ndarray
    dPsi_a: np.ndarray
    dPsi_b: np.ndarray

    def __post_init__(self):
        for name in ("Psi_a", "Psi_b", "dPsi_a", "dPsi_b"):
            v = _frozen(getattr(self, name))
            if v.shape != (2,) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a finite 2-vector")
            object.__setattr__(self, name, v)

    def scalar(self) -> BoundaryData1:
        """Boundary data of ``psi = psi1 + psi2``."""
        return BoundaryData1(
            self.Psi_a.sum(), self.Psi_b.sum(), self.dPsi_a.sum(), self.dPsi_b.sum()
        )


def one_sided_derivatives(f: np.ndarray, h: float) -> tuple[complex, complex]:
    """Second-order one-sided first derivatives at the two ends of ``f``."""
    f = np.asarray(f)
    if f.shape[-1] < 4:
        raise ValueError("insufficient points for boundary stencil")
    da = (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * h)
    db = (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * h)
    return da, db


def boundary_trace(
    state: Union[TwoComponentState, ScalarState, np.ndarray], grid: Grid
) -> Union[BoundaryData1, BoundaryData2]:
    """Endpoint values and one-sided 3-point derivatives of a sampled field.

    A :class:`TwoComponentState` gives :class:`BoundaryData2`; a
    :class:`ScalarState` (its ``psi``) or a bare array gives
    :class:`BoundaryData1`.
    """
    if grid.n_points < 4:
        raise ValueError("insufficient points for boundary stencil")
    h = grid.spacing
    if isinstance(state, TwoComponentState):
        f = state.stacked()
        if f.shape[1] != grid.n_points:
            raise ValueError("state does not match grid")
        da, db = one_sided_derivatives(f, h)
        return BoundaryData2(f[:, 0], f[:, -1], da, db)
    f = state.psi if isinstance(state, ScalarState) else np.asarray(state)
    if f.shape != (grid.n_points,):
        raise ValueError("state does not match grid")
    da, db = one_sided_derivatives(f, h)
    return BoundaryData1(f[0], f[-1], da, db)
