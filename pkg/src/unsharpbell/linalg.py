"""Small complex linear algebra for one- and two-qubit operators.

Operators are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4).
:func:`hermitian` is the single gate through which matrices become
"Hermitian operators": it symmetrizes floating-point drift and rejects
anything that is genuinely not self-adjoint.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class LinalgError(ValueError):
    pass


class NotHermitianError(LinalgError):
    pass


class ConvergenceError(LinalgError):
    pass


def hermitian(matrix, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``matrix`` as a Hermitian operator of dimension 2 or 4.

    Asymmetry below ``tol`` (Frobenius norm of ``H - H^dagger``) is absorbed
    by returning ``(H + H^dagger) / 2``; anything larger raises
    :class:`NotHermitianError`.
    """
    h = np.asarray(matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] not in (2, 4):
        raise LinalgError(f"expected a 2x2 or 4x4 matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise LinalgError("matrix has non-finite entries")
    asym = np.linalg.norm(h - h.conj().T)
    if asym > tol:
        raise NotHermitianError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return (h + h.conj().T) / 2


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis.upper()].copy()
    except KeyError:
        raise LinalgError(f"unknown Pauli axis {axis!r}") from None


PAULIS = (_PAULI["X"], _PAULI["Y"], _PAULI["Z"])


def vec3(v: Sequence[float]) -> np.ndarray:
    out = np.asarray(v, dtype=float)
    if out.shape != (3,) or not np.all(np.isfinite(out)):
        raise LinalgError(f"expected a finite 3-vector, got {v!r}")
    return out


def unit(v: Sequence[float], tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate that ``v`` is a unit 3-vector and return it as an array."""
    out = vec3(v)
    if abs(np.linalg.norm(out) - 1.0) > tol:
        raise LinalgError(f"direction {v!r} is not a unit vector (|v| = {np.linalg.norm(out)!r})")
    return out


def normalize(v: Sequence[float]) -> np.ndarray:
    out = vec3(v)
    norm = np.linalg.norm(out)
    if norm == 0:
        raise LinalgError("cannot normalize the zero vector")
    return out / norm


def bloch_operator(v: Sequence[float]) -> np.ndarray:
    """``v . sigma``; eigenvalues are ``+-|v|``."""
    x, y, z = vec3(v)
    return np.array([[z, x - 1j * y], [x + 1j * y, -z]], dtype=complex)


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two qubit operators, first factor on the outer blocks."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise LinalgError(f"tensor expects two 2x2 operators, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def trace(m) -> complex:
    return complex(np.trace(np.asarray(m)))


def _eigvals_2x2(h: np.ndarray) -> list[float]:
    a = h[0, 0].real
    d = h[1, 1].real
    mean = (a + d) / 2
    radius = np.hypot((a - d) / 2, abs(h[0, 1]))
    return [mean - radius, mean + radius]


def _off_norm(h: np.ndarray) -> float:
    return float(np.linalg.norm(h - np.diag(np.diag(h))))


def jacobi_eigvals(h: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> list[float]:
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Each (p, q) step first removes the phase of ``h[p, q]`` with a diagonal
    unitary, then zeroes the now-real element with a plane rotation. The
    stopping threshold is ``tol`` scaled by ``max(1, ||h||_F)``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _off_norm(a) < threshold:
            return sorted(float(x) for x in np.diag(a).real)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                theta = 0.5 * np.arctan2(2 * mag, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                u = np.eye(n, dtype=complex)
                # u = diag(phase at q) then rotation [[c, s], [-s, c]] on (p, q)
                u[p, p] = c
                u[p, q] = s
                u[q, p] = -s * phase.conjugate()
                u[q, q] = c * phase.conjugate()
                a = u.conj().T @ a @ u
                a[p, q] = a[q, p] = 0.0
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def eigvals_hermitian(h) -> list[float]:
    """Ascending real eigenvalues; closed form for 2x2, Jacobi for 4x4."""
    h = hermitian(h)
    if h.shape == (2, 2):
        return _eigvals_2x2(h)
    return jacobi_eigvals(h)


def is_psd(h, tol: float = PSD_TOL) -> bool:
    return eigvals_hermitian(h)[0] >= -tol
