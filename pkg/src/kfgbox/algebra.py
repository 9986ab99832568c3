"""Small dense matrix kernels: Pauli matrices, the nilpotent kinetic matrix,
Kronecker products, the 4x4 permutation ``S`` and a U(2) parametrization."""
from __future__ import annotations

import numpy as np

__all__ = [
    "pauli",
    "SX",
    "SY",
    "SZ",
    "ID2",
    "ID4",
    "singular_projector",
    "metric",
    "kron",
    "s_matrix",
    "s_matrix_pauli_sum",
    "u2_from_params",
    "u2_to_params",
    "unitarity_defect",
    "is_unitary",
    "random_unitary",
    "sesquilinear_identity_check",
    "CONSTRUCTED_UNITARY_TOL",
    "USER_UNITARY_TOL",
]

CONSTRUCTED_UNITARY_TOL = 1e-14
USER_UNITARY_TOL = 1e-10

ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(4, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (ID2, ID4, SX, SY, SZ):
    _m.setflags(write=False)

_PAULI = {"id": ID2, "sx": SX, "sy": SY, "sz": SZ}


def pauli(name: str) -> np.ndarray:
    """Return a fresh copy of ``id``, ``sx``, ``sy`` or ``sz``."""
    try:
        return _PAULI[name].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli matrix {name!r}; expected one of {sorted(_PAULI)}") from None


def singular_projector() -> np.ndarray:
    """``tau3 + i tau2 = [[1, 1], [-1, -1]]``. Nilpotent, hence not invertible."""
    return SZ + 1j * SY


def metric() -> np.ndarray:
    """The metric ``eta = tau3`` of the indefinite inner product."""
    return SZ.copy()


def kron(F, G) -> np.ndarray:
    """Kronecker product with block ``F[i, j] * G`` at block position (i, j)."""
    F = np.atleast_2d(np.asarray(F))
    G = np.atleast_2d(np.asarray(G))
    m, n = F.shape
    p, q = G.shape
    out = np.zeros((m * p, n * q), dtype=np.result_type(F, G))
    for i in range(m):
        for j in range(n):
            out[i * p:(i + 1) * p, j * q:(j + 1) * q] = F[i, j] * G
    return out


def s_matrix() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, -1]], dtype=complex
    )


def s_matrix_pauli_sum(xy_sign: int = -1) -> np.ndarray:
    """``(1/2)(sz(x)1 + i sy(x)sx + xy_sign * i sx(x)sy + 1(x)sz)``.

    Only ``xy_sign = -1`` reproduces :func:`s_matrix`; with ``+1`` the sum is
    a rank-1, non-unitary matrix.
    """
    if xy_sign not in (1, -1):
        raise ValueError("xy_sign must be +1 or -1")
    return 0.5 * (
        kron(SZ, ID2) + 1j * kron(SY, SX) + xy_sign * 1j * kron(SX, SY) + kron(ID2, SZ)
    )


def u2_from_params(mu: float, n0: float, n1: float, n2: float, n3: float) -> np.ndarray:
    """``exp(i mu) (n0 1 + i (n1 sx + n2 sy + n3 sz))`` with (n0..n3) normalized.

    Every 2x2 unitary is reached: a phase times an SU(2) element.
    """
    n = np.array([n0, n1, n2, n3], dtype=float)
    norm = np.linalg.norm(n)
    if not np.isfinite(norm) or norm == 0:
        raise ValueError("U(2) parameter vector must be nonzero and finite")
    n0, n1, n2, n3 = n / norm
    return np.exp(1j * mu) * (n0 * ID2 + 1j * (n1 * SX + n2 * SY + n3 * SZ))


def u2_to_params(U) -> tuple[float, float, float, float, float]:
    """Inverse of :func:`u2_from_params` (one branch of the phase)."""
    U = np.asarray(U, dtype=complex)
    mu = 0.5 * np.angle(np.linalg.det(U))
    V = np.exp(-1j * mu) * U
    # V = [[n0 + i n3, n2 + i n1], [-n2 + i n1, n0 - i n3]]
    n0 = 0.5 * (V[0, 0] + V[1, 1]).real
    n3 = 0.5 * (V[0, 0] - V[1, 1]).imag
    n1 = 0.5 * (V[0, 1] + V[1, 0]).imag
    n2 = 0.5 * (V[0, 1] - V[1, 0]).real
    return float(mu), float(n0), float(n1), float(n2), float(n3)


def unitarity_defect(U) -> float:
    """``max |U^dagger U - 1|`` entrywise."""
    U = np.asarray(U, dtype=complex)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def is_unitary(U, tol: float = USER_UNITARY_TOL) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or not np.all(np.isfinite(U)):
        return False
    return unitarity_defect(U) <= tol


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def _identity_27(z1, z2):
    lhs = z1 * np.conj(z2) - np.conj(z1) * z2
    rhs = 0.5j * (abs(z1 + 1j * z2) ** 2 - abs(z1 - 1j * z2) ** 2)
    return lhs, rhs


def _identity_a11(z1, z2, z3, z4):
    lhs = z1 * np.conj(z2) - np.conj(z3) * z4
    rhs = 0.5j * (
        (z1 + 1j * z4) * np.conj(z3 + 1j * z2) - (z1 - 1j * z4) * np.conj(z3 - 1j * z2)
    )
    return lhs, rhs


def _identity_33(Z1, Z2):
    Z1, Z2 = np.asarray(Z1), np.asarray(Z2)
    h = lambda X: X.conj().T  # noqa: E731
    lhs = h(Z2) @ Z1 - h(Z1) @ Z2
    P, M = Z1 + 1j * Z2, Z1 - 1j * Z2
    rhs = 0.5j * (h(P) @ P - h(M) @ M)
    return lhs, rhs


def sesquilinear_identity_check(z1, z2, z3=None, z4=None, Z1=None, Z2=None) -> float:
    """Max residual of the three polarization-type identities.

    Checks ``z1 z2* - z1* z2`` in squared-modulus form, its four-argument
    generalization ``z1 z2* - z3* z4`` (which collapses to the former for
    ``z3 = z1, z4 = z2``), and the matrix version
    ``Z2^dag Z1 - Z1^dag Z2 = (i/2)[(Z1+iZ2)^dag(Z1+iZ2) - (Z1-iZ2)^dag(Z1-iZ2)]``
    when matrix arguments are given. Residuals are absolute.
    """
    residuals = []
    lhs, rhs = _identity_27(z1, z2)
    residuals.append(abs(lhs - rhs))
    z3 = z1 if z3 is None else z3
    z4 = z2 if z4 is None else z4
    lhs, rhs = _identity_a11(z1, z2, z3, z4)
    residuals.append(abs(lhs - rhs))
    # reduction of the 4-argument form back to the 2-argument one
    lhs_red, _ = _identity_a11(z1, z2, z1, z2)
    residuals.append(abs(lhs_red - _identity_27(z1, z2)[0]))
    if Z1 is not None and Z2 is not None:
        lhs, rhs = _identity_33(Z1, Z2)
        residuals.append(float(np.max(np.abs(lhs - rhs))))
    return float(max(residuals))
