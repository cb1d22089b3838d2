"""Full counting statistics of quantum jumps in the long-time limit.

The scaled cumulant generating function (SCGF) theta(s) of the click number
is the largest-real-part eigenvalue of the count-tilted generator; its
derivatives give the activity k(s) = -theta'(s) and the Mandel parameter
Q(s) = -theta''(s)/theta'(s) - 1.  Derivatives are taken by Richardson-
refined central differences, with the first derivative cross-checked
against the eigenvector perturbation identity

    theta'(s) = -exp(-s) Re[ l^H (J r) / (l^H r) ],

where J is the recycling superoperator and (l, r) the leading left/right
eigenvectors; a disagreement flags an eigenvalue-branch switch and raises
rather than returning a silently wrong derivative.

Finite-time quantities use the same generator matrices: the moment
generating function Z_t(s) by a single matrix exponential, and the exact
count distribution P_t(K) by exponentiating the block-bidiagonal generator
of the jump-number-resolved hierarchy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .liouville import (
    check_density_matrix,
    devectorize,
    ground_state,
    jump_superoperator_matrix,
    tilted_generator,
    vectorize,
)
from .model import AtomParams, Unraveling, shifted_unraveling

__all__ = [
    "LeadingEigenvalueError",
    "DerivativeConsistencyError",
    "TruncationWarning",
    "CountingStatistics",
    "CountDistribution",
    "SweepPoint",
    "scgf",
    "scgf_derivatives",
    "activity_mandel",
    "sweep",
    "finite_time_mgf",
    "counting_resolved_pk",
]

#: default finite-difference step for SCGF derivatives.
DEFAULT_FD_STEP = 1.0e-3

_IMAG_RESIDUAL_TOL = 1.0e-9
_DERIVATIVE_AGREEMENT_TOL = 1.0e-5


class LeadingEigenvalueError(RuntimeError):
    """The leading eigenvalue has a non-negligible imaginary part."""


class DerivativeConsistencyError(RuntimeError):
    """Finite-difference and perturbation first derivatives disagree."""


class TruncationWarning(UserWarning):
    """The count-resolved hierarchy leaked probability past k_max."""


@dataclass(frozen=True)
class CountingStatistics:
    """SCGF value and click statistics at one tilt value.

    ``activity`` is exactly ``-theta_prime`` and ``mandel_q`` exactly
    ``-theta_double_prime / theta_prime - 1`` (NaN when the activity
    vanishes); ``imag_residual`` is |Im| of the selected eigenvalue.
    """

    s: float
    theta: float
    theta_prime: float
    theta_double_prime: float
    activity: float
    mandel_q: float
    imag_residual: float


@dataclass(frozen=True)
class CountDistribution:
    """Exact click-number distribution P_t(K), K = 0..k_max.

    ``truncation_tail`` is the probability mass beyond k_max, defined as
    1 - sum(probabilities).
    """

    t: float
    probabilities: np.ndarray
    truncation_tail: float


@dataclass(frozen=True)
class SweepPoint:
    """One (s, alpha) grid point of a sweep; NaN-valued when it failed."""

    s: float
    alpha: float
    theta: float
    activity: float
    mandel_q: float
    imag_residual: float
    diagnostic: str | None = None


def _frequency_scale(u: Unraveling) -> float:
    """Characteristic frequency of the dynamics, for relative tolerances."""
    ldl = u.jump.conj().T @ u.jump
    return max(
        float(np.max(np.abs(u.hamiltonian))),
        float(np.max(np.abs(ldl))),
        np.finfo(np.float64).tiny,
    )


def _polished_leading(
    u: Unraveling, s: float
) -> tuple[complex, np.ndarray, np.ndarray]:
    """Leading eigenvalue of the tilted generator with its eigenvectors.

    The eigenvalue is refined by the two-sided Rayleigh quotient
    l^H W r / (l^H r), which is second order in the eigenvector error and
    pushes the value to near machine precision; finite-difference stencils
    of theta would otherwise amplify eigensolver roundoff by 1/h^2.
    """
    w = tilted_generator(u, s).matrix
    value, right, left = linalg.leading_eigenpair(w)
    overlap = left.conj() @ right
    if abs(overlap) >= linalg.DEGENERATE_PAIR_TOL:
        value = complex((left.conj() @ (w @ right)) / overlap)
    return value, right, left


def scgf(u: Unraveling, s: float) -> tuple[float, np.ndarray, np.ndarray, float]:
    """SCGF theta(s) with the leading left/right eigenvectors.

    Returns ``(theta, right, left, imag_residual)``.  Raises
    ``LeadingEigenvalueError`` when the selected eigenvalue carries an
    imaginary part beyond 1e-9 of the characteristic frequency, which
    signals an eigenvalue crossing or degeneracy at this ``s``.
    """
    value, right, left = _polished_leading(u, s)
    imag_residual = abs(value.imag)
    if imag_residual > _IMAG_RESIDUAL_TOL * _frequency_scale(u):
        raise LeadingEigenvalueError(
            f"leading eigenvalue {value:.6g} at s = {s:.6g} is not real "
            f"(|Im| = {imag_residual:.3e})"
        )
    return float(value.real), right, left, float(imag_residual)


def _theta_only(u: Unraveling, s: float) -> float:
    """theta(s) for difference stencils (same polished evaluation as scgf)."""
    return float(_polished_leading(u, s)[0].real)


def _derivatives(
    u: Unraveling,
    s: float,
    h: float,
    center: tuple[float, np.ndarray, np.ndarray, float],
) -> tuple[float, float]:
    """Richardson-refined central differences with perturbation cross-check."""
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError(f"finite-difference step must be > 0, got {h}")
    theta0, right, left, _ = center
    tp1 = _theta_only(u, s + h)
    tm1 = _theta_only(u, s - h)
    tp2 = _theta_only(u, s + 0.5 * h)
    tm2 = _theta_only(u, s - 0.5 * h)

    d1_h = (tp1 - tm1) / (2.0 * h)
    d1_h2 = (tp2 - tm2) / h
    d1 = (4.0 * d1_h2 - d1_h) / 3.0

    d2_h = (tp1 - 2.0 * theta0 + tm1) / h**2
    d2_h2 = (tp2 - 2.0 * theta0 + tm2) / (0.5 * h) ** 2
    d2 = (4.0 * d2_h2 - d2_h) / 3.0

    jmat = jump_superoperator_matrix(u)
    overlap = left.conj() @ right
    d1_pert = -math.exp(-s) * float((left.conj() @ (jmat @ right) / overlap).real)
    if abs(d1 - d1_pert) > _DERIVATIVE_AGREEMENT_TOL * max(1.0, abs(d1)):
        raise DerivativeConsistencyError(
            f"theta'({s:.6g}) finite difference {d1:.9g} vs perturbation "
            f"{d1_pert:.9g}; the leading eigenvalue branch likely switches "
            f"within the stencil"
        )
    return float(d1), float(d2)


def scgf_derivatives(
    u: Unraveling, s: float, h: float = DEFAULT_FD_STEP
) -> tuple[float, float]:
    """First and second derivative of the SCGF at ``s``."""
    return _derivatives(u, s, h, scgf(u, s))


def activity_mandel(
    u: Unraveling, s: float, h: float = DEFAULT_FD_STEP
) -> CountingStatistics:
    """Activity and Mandel parameter of the (possibly biased) ensemble at ``s``."""
    center = scgf(u, s)
    d1, d2 = _derivatives(u, s, h, center)
    activity = -d1
    mandel_q = -d2 / d1 - 1.0 if d1 != 0.0 else math.nan
    return CountingStatistics(
        s=float(s),
        theta=center[0],
        theta_prime=d1,
        theta_double_prime=d2,
        activity=activity,
        mandel_q=mandel_q,
        imag_residual=center[3],
    )


def _check_grid(values, name: str) -> np.ndarray:
    grid = np.asarray(values, dtype=np.float64).ravel()
    if grid.size == 0:
        raise ValueError(f"{name} grid is empty")
    if not np.all(np.isfinite(grid)):
        raise ValueError(f"{name} grid has non-finite values")
    if grid.size > 1:
        steps = np.diff(grid)
        if not (np.all(steps > 0.0) or np.all(steps < 0.0)):
            raise ValueError(f"{name} grid must be strictly monotone")
    return grid


def sweep(
    p_base: AtomParams,
    s_values,
    alpha_values,
    h: float = DEFAULT_FD_STEP,
) -> list[SweepPoint]:
    """Counting statistics of the shifted unraveling over an (s, alpha) grid.

    Rows are ordered alpha-outer, s-inner.  A failure at one grid point is
    recorded as a NaN row carrying the diagnostic message; it never aborts
    the rest of the sweep.
    """
    s_grid = _check_grid(s_values, "s")
    a_grid = _check_grid(alpha_values, "alpha")
    rows: list[SweepPoint] = []
    for alpha in a_grid:
        try:
            u = shifted_unraveling(
                AtomParams(gamma=p_base.gamma, omega=p_base.omega, alpha=complex(alpha))
            )
        except (ValueError, RuntimeError) as exc:
            rows.extend(
                SweepPoint(float(s), float(alpha), math.nan, math.nan, math.nan,
                           math.nan, diagnostic=str(exc))
                for s in s_grid
            )
            continue
        for s in s_grid:
            try:
                cs = activity_mandel(u, float(s), h)
            except (ValueError, RuntimeError) as exc:
                rows.append(
                    SweepPoint(float(s), float(alpha), math.nan, math.nan,
                               math.nan, math.nan, diagnostic=str(exc))
                )
                continue
            rows.append(
                SweepPoint(
                    s=float(s),
                    alpha=float(alpha),
                    theta=cs.theta,
                    activity=cs.activity,
                    mandel_q=cs.mandel_q,
                    imag_residual=cs.imag_residual,
                )
            )
    return rows


def finite_time_mgf(
    u: Unraveling, s: float, t: float, rho0: np.ndarray | None = None
) -> float:
    """Moment generating function Z_t(s) = <exp(-s K)> at finite time ``t``.

    Computed as the trace of exp(t W_s) applied to the vectorized initial
    state.  Z_0(s) = 1, and for s >= 0 the value lies in (0, 1].
    """
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"counting time must be finite and >= 0, got {t}")
    rho = ground_state() if rho0 is None else check_density_matrix(rho0)
    gen = tilted_generator(u, float(s))
    z = np.trace(devectorize(linalg.expm(gen.matrix, t) @ vectorize(rho)))
    return float(z.real)


def counting_resolved_pk(
    u: Unraveling,
    t: float,
    k_max: int,
    rho0: np.ndarray | None = None,
    tail_tol: float = 1.0e-6,
) -> CountDistribution:
    """Exact P_t(K) for K = 0..k_max via the count-resolved hierarchy.

    The unnormalized K-jump states obey d rho_K/dt = L0 rho_K + J rho_{K-1}
    with L0 the no-jump generator and J the recycling superoperator; one
    matrix exponential of the block-bidiagonal stacked generator yields all
    P_t(K) = tr rho_K(t) at once, exact up to expm accuracy.  A truncation
    tail above ``tail_tol`` triggers a TruncationWarning (raise k_max for
    the recommended k_max >= k t + 10 sqrt(k t)).
    """
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"counting time must be finite and >= 0, got {t}")
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    rho = ground_state() if rho0 is None else check_density_matrix(rho0)

    no_jump = tilted_generator(u, math.inf).matrix
    jmat = jump_superoperator_matrix(u)
    d2 = no_jump.shape[0]
    blocks = int(k_max) + 1
    gen = np.zeros((blocks * d2, blocks * d2), dtype=np.complex128)
    for k in range(blocks):
        gen[k * d2 : (k + 1) * d2, k * d2 : (k + 1) * d2] = no_jump
        if k > 0:
            gen[k * d2 : (k + 1) * d2, (k - 1) * d2 : k * d2] = jmat

    state = np.zeros(blocks * d2, dtype=np.complex128)
    state[:d2] = vectorize(rho)
    state = linalg.expm(gen, t) @ state

    probs = np.empty(blocks, dtype=np.float64)
    for k in range(blocks):
        probs[k] = float(np.trace(devectorize(state[k * d2 : (k + 1) * d2])).real)
    tail = 1.0 - float(probs.sum())
    if tail > tail_tol:
        warnings.warn(
            f"count distribution truncated at k_max = {k_max}: tail mass "
            f"{tail:.3e} exceeds {tail_tol:g}",
            TruncationWarning,
            stacklevel=2,
        )
    return CountDistribution(t=float(t), probabilities=probs, truncation_tail=tail)
