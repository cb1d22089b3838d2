"""Dense complex linear algebra for small operator matrices.

Kronecker products, a scaling-and-squaring matrix exponential, and a
non-symmetric complex eigensolver (Householder Hessenberg reduction plus
Wilkinson-shifted QR iteration) that returns left and right eigenvectors.
Everything operates on plain ``complex128`` numpy arrays and is tuned for
the matrix sizes this package actually meets (n <= 64), favouring
robustness and accuracy over large-n speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "EigenPairingError",
    "EigenDecomposition",
    "EXPM_MAX_NORM",
    "DEGENERATE_PAIR_TOL",
    "kron",
    "expm",
    "eig",
    "eigvals",
    "leading_eigenpair",
]

_EPS = float(np.finfo(np.float64).eps)
_TINY = float(np.finfo(np.float64).tiny)

#: ``expm`` rejects arguments with ``||t*a||_1`` beyond this (overflow guard).
EXPM_MAX_NORM = 1.0e4

# Taylor terms in the expm core; remainder < 1e-19 once the norm is <= 1.
_EXPM_TERMS = 20

# QR sweeps allowed per eigenvalue before reporting non-convergence.
_QR_MAX_ITER = 30

# Left/right spectra must match this closely (relative to max(1, ||a||_1)).
_PAIRING_TOL = 1.0e-6

#: ``|l^H r|`` below this marks a numerically defective left/right pair.
DEGENERATE_PAIR_TOL = 1.0e-8


class ConvergenceError(RuntimeError):
    """QR iteration did not deflate an eigenvalue within the sweep cap."""


class EigenPairingError(RuntimeError):
    """Left and right spectra could not be matched unambiguously."""


def _as_matrix(a, who: str) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"{who}: expected a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError(f"{who}: non-finite matrix entries")
    return m


def _as_square(a, who: str) -> np.ndarray:
    m = _as_matrix(a, who)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{who}: matrix must be square, got shape {m.shape}")
    return m


def _norm1(a: np.ndarray) -> float:
    """Maximum absolute column sum."""
    return float(np.max(np.sum(np.abs(a), axis=0)))


def kron(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b`` with shape (ra*rb, ca*cb)."""
    ma = _as_matrix(a, "kron")
    mb = _as_matrix(b, "kron")
    ra, ca = ma.shape
    rb, cb = mb.shape
    return (ma[:, None, :, None] * mb[None, :, None, :]).reshape(ra * rb, ca * cb)


def expm(a, t: float = 1.0) -> np.ndarray:
    """``e^{t a}`` by scaling and squaring around a truncated Taylor core.

    The argument is halved until its 1-norm is at most 1, the series is
    summed by Horner's rule, and the result squared back up.  Relative
    accuracy is well below 1e-10 for ``||t a||_1 <= 10``; arguments with
    ``||t a||_1 > EXPM_MAX_NORM`` are rejected rather than overflowed.
    """
    m = _as_square(a, "expm")
    b = t * m
    n = b.shape[0]
    nrm = _norm1(b)
    if nrm > EXPM_MAX_NORM:
        raise ValueError(f"expm: ||t*a||_1 = {nrm:.4g} exceeds {EXPM_MAX_NORM:g}")
    squarings = int(np.ceil(np.log2(nrm))) if nrm > 1.0 else 0
    c = b / (2.0**squarings)
    eye = np.eye(n, dtype=np.complex128)
    p = eye.copy()
    for k in range(_EXPM_TERMS, 0, -1):
        p = eye + (c / k) @ p
    for _ in range(squarings):
        p = p @ p
    if not np.all(np.isfinite(p.real)) or not np.all(np.isfinite(p.imag)):
        raise ValueError("expm: result overflowed to non-finite values")
    return p


def _hessenberg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unitary reduction ``a = q h q^H`` with ``h`` upper Hessenberg."""
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=np.complex128)
    scale = max(_norm1(h), _TINY)
    for k in range(n - 2):
        x = h[k + 1 :, k]
        xn = float(np.linalg.norm(x))
        if xn <= _EPS * scale:
            h[k + 2 :, k] = 0.0
            continue
        v = x.copy()
        phase = v[0] / abs(v[0]) if v[0] != 0.0 else 1.0 + 0.0j
        v[0] += phase * xn
        v /= np.linalg.norm(v)
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        q[:, k + 1 :] -= 2.0 * np.outer(q[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h, q


def _wilkinson_shift(t: np.ndarray, hi: int) -> complex:
    """Eigenvalue of the trailing 2x2 block closest to the corner entry."""
    a = t[hi - 1, hi - 1]
    b = t[hi - 1, hi]
    c = t[hi, hi - 1]
    d = t[hi, hi]
    disc = np.sqrt((a - d) ** 2 + 4.0 * b * c + 0.0j)
    r1 = 0.5 * ((a + d) + disc)
    r2 = 0.5 * ((a + d) - disc)
    return r1 if abs(r1 - d) <= abs(r2 - d) else r2


def _qr_sweep(t, z, lo: int, hi: int, shift: complex) -> None:
    """One explicitly shifted QR step on the active block ``[lo..hi]``.

    Row rotations run to the right edge and column rotations to the top of
    the matrix so that the full Schur similarity is maintained; ``z``, when
    given, accumulates the unitary.
    """
    n = t.shape[0]
    right = n if z is not None else hi + 1
    top = 0 if z is not None else lo
    for k in range(lo, hi + 1):
        t[k, k] -= shift
    rot: list[tuple[complex, complex]] = []
    for k in range(lo, hi):
        ak = t[k, k]
        bk = t[k + 1, k]
        r = float(np.hypot(abs(ak), abs(bk)))
        if r == 0.0:
            u, v = 1.0 + 0.0j, 0.0 + 0.0j
        else:
            u, v = ak / r, bk / r
        rot.append((u, v))
        row_k = t[k, k:right].copy()
        row_k1 = t[k + 1, k:right]
        t[k, k:right] = np.conj(u) * row_k + np.conj(v) * row_k1
        t[k + 1, k:right] = u * row_k1 - v * row_k
        t[k + 1, k] = 0.0
    for k in range(lo, hi):
        u, v = rot[k - lo]
        col_k = t[top : k + 2, k].copy()
        col_k1 = t[top : k + 2, k + 1]
        t[top : k + 2, k] = u * col_k + v * col_k1
        t[top : k + 2, k + 1] = np.conj(u) * col_k1 - np.conj(v) * col_k
        if z is not None:
            zk = z[:, k].copy()
            z[:, k] = u * zk + v * z[:, k + 1]
            z[:, k + 1] = np.conj(u) * z[:, k + 1] - np.conj(v) * zk
    for k in range(lo, hi + 1):
        t[k, k] += shift


def _schur(a: np.ndarray, accumulate: bool = True):
    """Complex Schur form ``t = z^H a z`` (``z`` is None when not accumulated)."""
    n = a.shape[0]
    if n == 1:
        return a.copy(), (np.eye(1, dtype=np.complex128) if accumulate else None)
    t, z = _hessenberg(a)
    if not accumulate:
        z = None
    scale = max(_norm1(t), _TINY)
    hi = n - 1
    iters = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            local = abs(t[lo - 1, lo - 1]) + abs(t[lo, lo])
            if abs(t[lo, lo - 1]) <= _EPS * (local if local > 0.0 else scale):
                t[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            iters = 0
            continue
        iters += 1
        if iters > _QR_MAX_ITER:
            raise ConvergenceError(
                f"QR iteration stalled on eigenvalue {hi + 1} of {n} "
                f"after {_QR_MAX_ITER} sweeps"
            )
        if iters % 10 == 0:
            # ad-hoc exceptional shift; breaks the rare symmetric stall
            shift = t[hi, hi] + 0.75 * abs(t[hi, hi - 1])
        else:
            shift = _wilkinson_shift(t, hi)
        _qr_sweep(t, z, lo, hi, shift)
    return t, z


def _right_vectors_of_schur(t: np.ndarray) -> np.ndarray:
    """Eigenvectors of an upper-triangular matrix by back-substitution.

    Near-defective denominators are floored at eps * ||t||_1, which keeps
    the solve bounded; the caller detects genuinely degenerate pairs via
    the left/right overlap.
    """
    n = t.shape[0]
    tnorm = max(_norm1(t), _TINY)
    y = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        lam = t[i, i]
        y[i, i] = 1.0
        for j in range(i - 1, -1, -1):
            acc = t[j, j + 1 : i + 1] @ y[j + 1 : i + 1, i]
            den = t[j, j] - lam
            if abs(den) < _EPS * tnorm:
                den = _EPS * tnorm
            y[j, i] = -acc / den
    return y


@dataclass(frozen=True)
class EigenDecomposition:
    """Full spectral data of a dense complex matrix.

    Eigenvalues are ordered by descending real part (ties by ascending
    ``|Im|``).  Right eigenvectors have unit norm; each left eigenvector is
    scaled so that ``l^H r = 1`` unless the pair is flagged degenerate.
    ``residual_norms[i]`` is the larger of ``||a r - lambda r||`` and
    ``||a^H l - conj(lambda) l|| / ||l||``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residual_norms: np.ndarray
    degenerate_pairs: np.ndarray


def eig(a) -> EigenDecomposition:
    """Eigenvalues with right and left eigenvectors of a square matrix.

    Right vectors come from back-substitution on the Schur form; left
    vectors are right eigenvectors of the conjugate transpose, paired to
    the right spectrum by greedy nearest-eigenvalue matching.
    """
    m = _as_square(a, "eig")
    n = m.shape[0]
    if n > 64:
        raise ValueError(f"eig: supported up to n = 64, got n = {n}")

    t, z = _schur(m, accumulate=True)
    lam = np.diag(t).copy()
    right = z @ _right_vectors_of_schur(t)
    right /= np.linalg.norm(right, axis=0, keepdims=True)

    th, zh = _schur(m.conj().T, accumulate=True)
    mu = np.conj(np.diag(th))
    left = zh @ _right_vectors_of_schur(th)
    left /= np.linalg.norm(left, axis=0, keepdims=True)

    # pair left vectors to right eigenvalues (greedy nearest)
    scale = max(1.0, _norm1(m))
    unused = list(range(n))
    order = np.empty(n, dtype=int)
    for i in range(n):
        dists = [abs(mu[j] - lam[i]) for j in unused]
        pick = int(np.argmin(dists))
        if dists[pick] > _PAIRING_TOL * scale:
            raise EigenPairingError(
                f"eig: left/right eigenvalue mismatch {dists[pick]:.3e} "
                f"for eigenvalue {lam[i]:.6g}"
            )
        order[i] = unused.pop(pick)
    left = left[:, order]

    degenerate = np.zeros(n, dtype=bool)
    for i in range(n):
        overlap = left[:, i].conj() @ right[:, i]
        if abs(overlap) < DEGENERATE_PAIR_TOL:
            degenerate[i] = True
        else:
            left[:, i] /= np.conj(overlap)

    residuals = np.empty(n, dtype=np.float64)
    for i in range(n):
        res_r = np.linalg.norm(m @ right[:, i] - lam[i] * right[:, i])
        lnorm = np.linalg.norm(left[:, i])
        res_l = np.linalg.norm(m.conj().T @ left[:, i] - np.conj(lam[i]) * left[:, i])
        residuals[i] = max(float(res_r), float(res_l / max(lnorm, _TINY)))

    idx = np.lexsort((lam.imag, np.abs(lam.imag), -lam.real))
    return EigenDecomposition(
        eigenvalues=lam[idx],
        right_vectors=right[:, idx],
        left_vectors=left[:, idx],
        residual_norms=residuals[idx],
        degenerate_pairs=degenerate[idx],
    )


def eigvals(a) -> np.ndarray:
    """Eigenvalues only (no eigenvectors, noticeably cheaper than eig)."""
    m = _as_square(a, "eigvals")
    t, _ = _schur(m, accumulate=False)
    lam = np.diag(t).copy()
    return lam[np.lexsort((lam.imag, np.abs(lam.imag), -lam.real))]


def leading_eigenpair(a) -> tuple[complex, np.ndarray, np.ndarray]:
    """Eigenpair with maximal real part; real-part ties pick smaller ``|Im|``."""
    dec = eig(a)
    lam = dec.eigenvalues
    tol = 1.0e-12 * max(1.0, float(np.max(np.abs(lam))))
    cands = np.flatnonzero(lam.real >= lam.real.max() - tol)
    i = int(cands[np.argmin(np.abs(lam.imag[cands]))])
    return (
        complex(lam[i]),
        dec.right_vectors[:, i].copy(),
        dec.left_vectors[:, i].copy(),
    )
