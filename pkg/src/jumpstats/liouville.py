"""Density-matrix vectorization and Liouville-space generator matrices.

Column-stacking convention: ``vec(X)[i + d*j] = X[i, j]``, so that
``vec(A X B) = (B^T kron A) vec(X)``.  Under it the Lindblad generator of a
pair (H, L) is the d^2 x d^2 matrix

    M = -i (I kron H - H^T kron I) + conj(L) kron L
        - 1/2 (I kron L^dag L + (L^dag L)^T kron I),

and weighting the recycling term ``conj(L) kron L`` by exp(-s) yields the
count-tilted generator whose spectral abscissa is the scaled cumulant
generating function of the click number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .model import Unraveling

__all__ = [
    "GeneratorMatrix",
    "vectorize",
    "devectorize",
    "ground_state",
    "excited_state",
    "check_density_matrix",
    "lindblad_generator",
    "tilted_generator",
    "jump_superoperator_matrix",
]

_DENSITY_TOL = 1.0e-12


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a d x d matrix into a d^2 vector."""
    m = np.asarray(rho, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"vectorize: expected a square matrix, got shape {m.shape}")
    return m.flatten(order="F")


def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of ``vectorize``; the length must be a perfect square."""
    vec = np.asarray(v, dtype=np.complex128).ravel()
    d = math.isqrt(vec.size)
    if d * d != vec.size:
        raise ValueError(f"devectorize: length {vec.size} is not a perfect square")
    return vec.reshape((d, d), order="F")


def ground_state() -> np.ndarray:
    """Density matrix |g><g|."""
    return np.diag([1.0, 0.0]).astype(np.complex128)


def excited_state() -> np.ndarray:
    """Density matrix |e><e|."""
    return np.diag([0.0, 1.0]).astype(np.complex128)


def check_density_matrix(rho: np.ndarray, tol: float = _DENSITY_TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a 2x2 state."""
    m = np.asarray(rho, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"density matrix must be 2x2, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(m) - 1.0) > tol:
        raise ValueError(f"density matrix trace is {np.trace(m):.6g}, expected 1")
    # closed-form eigenvalues of a 2x2 Hermitian matrix
    mean = 0.5 * (m[0, 0].real + m[1, 1].real)
    radius = math.hypot(0.5 * (m[0, 0].real - m[1, 1].real), abs(m[0, 1]))
    if mean - radius < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {mean - radius:.3e}")
    return m


@dataclass(frozen=True)
class GeneratorMatrix:
    """Matrix representation of a (possibly count-tilted) generator.

    ``matrix`` acts on column-stacked density matrices; ``s`` is the
    counting-field value (0 for the plain Lindblad generator) and
    ``source`` the unraveling the matrix was built from.
    """

    matrix: np.ndarray
    s: float
    source: Unraveling


def jump_superoperator_matrix(u: Unraveling) -> np.ndarray:
    """Matrix of the recycling superoperator rho -> L rho L^dag."""
    return linalg.kron(u.jump.conj(), u.jump)


def lindblad_generator(u: Unraveling) -> GeneratorMatrix:
    """Matrix of the Lindblad generator of the unraveling's master equation."""
    h = u.hamiltonian
    ell = u.jump
    eye = np.eye(h.shape[0], dtype=np.complex128)
    ldl = ell.conj().T @ ell
    m = (
        -1j * (linalg.kron(eye, h) - linalg.kron(h.T, eye))
        + linalg.kron(ell.conj(), ell)
        - 0.5 * (linalg.kron(eye, ldl) + linalg.kron(ldl.T, eye))
    )
    return GeneratorMatrix(matrix=m, s=0.0, source=u)


def tilted_generator(u: Unraveling, s: float) -> GeneratorMatrix:
    """Lindblad generator with the recycling term weighted by exp(-s).

    ``s = 0`` recovers ``lindblad_generator`` exactly; ``s = +inf`` is
    accepted as the documented no-jump limit (the recycling term dropped,
    leaving the evolution generated by the effective Hamiltonian).
    """
    s = float(s)
    if math.isnan(s) or s == -math.inf:
        raise ValueError(f"tilt parameter must be finite or +inf, got {s}")
    try:
        weight = math.exp(-s) - 1.0
    except OverflowError:
        raise ValueError(f"tilt parameter s = {s:g} overflows exp(-s)") from None
    base = lindblad_generator(u)
    m = base.matrix + weight * jump_superoperator_matrix(u)
    return GeneratorMatrix(matrix=m, s=s, source=u)
