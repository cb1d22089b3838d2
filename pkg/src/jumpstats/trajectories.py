"""Monte Carlo quantum-jump trajectories and empirical count statistics.

The integrator is a fixed-step scheme: per step the state is propagated by
the exact no-jump propagator exp(-i H_eff dt) (computed once), the jump
probability is read off the norm loss p = 1 - ||U psi||^2, and a single
uniform variate decides between renormalized no-jump evolution and the
jump update L psi / ||L psi||.  With at most one jump per step the scheme
is first order in dt; the guard dt <= 0.05 / ||L^dag L|| keeps the
per-step jump probability small.

Randomness is counter-based: every trajectory owns a Philox stream keyed
by a seed hashed from (master_seed, trajectory index), so ensembles are
reproducible independently of batching or scheduling, and any ensemble
member can be replayed standalone from its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from . import linalg
from .model import AtomParams, Unraveling

__all__ = [
    "TrajectoryRecord",
    "CountHistogram",
    "EnsembleStatistics",
    "BiasedStatistics",
    "default_time_step",
    "trajectory_seeds",
    "simulate_trajectory",
    "ensemble_statistics",
    "average_conditional_density",
    "biased_statistics",
    "write_histogram_csv",
]

#: bootstrap resamples used for standard errors.
BOOTSTRAP_RESAMPLES = 200

#: worst-case per-step jump probability allowed by the dt guard.
MAX_STEP_JUMP_PROBABILITY = 0.05

# elements per uniform-variate buffer (bounds memory of batched runs)
_RANDOM_BUFFER_ELEMENTS = 8_000_000

_BOOTSTRAP_TAG = 0xB005


@dataclass(frozen=True)
class TrajectoryRecord:
    """One stochastic trajectory: click times and the final pure state.

    ``t`` is the simulated duration, i.e. the requested time rounded to a
    whole number of steps of size ``dt``.
    """

    jump_times: np.ndarray
    final_state: np.ndarray
    seed: int
    t: float
    dt: float


@dataclass(frozen=True)
class CountHistogram:
    """Empirical distribution of click numbers over an ensemble."""

    counts: dict[int, int]
    n_traj: int
    t: float

    def occurrences(self) -> tuple[np.ndarray, np.ndarray]:
        """Click numbers and their multiplicities, sorted by click number."""
        ks = np.array(sorted(self.counts), dtype=np.int64)
        ns = np.array([self.counts[int(k)] for k in ks], dtype=np.int64)
        return ks, ns


@dataclass(frozen=True)
class EnsembleStatistics:
    """Activity and Mandel estimates with bootstrap standard errors.

    ``q_hat`` (and ``se_q``) are None when no clicks occurred, in which
    case the Mandel parameter is undefined.
    """

    k_hat: float
    q_hat: float | None
    histogram: CountHistogram
    se_k: float
    se_q: float | None


@dataclass(frozen=True)
class BiasedStatistics:
    """Reweighted (exp(-sK)-biased) ensemble statistics."""

    k_s: float
    q_s: float | None
    effective_sample_size: float


def default_time_step(params: AtomParams) -> float:
    """Default integrator step: 1e-3 over the fastest rate in the problem."""
    scale = max(params.gamma, abs(params.omega), abs(params.alpha) ** 2)
    return 1.0e-3 / scale


def trajectory_seeds(master_seed: int, n_traj: int) -> np.ndarray:
    """Per-trajectory Philox keys hashed from (master_seed, index)."""
    if master_seed < 0:
        raise ValueError(f"master seed must be >= 0, got {master_seed}")
    return SeedSequence(master_seed).generate_state(n_traj, np.uint64)


def _jump_norm_bound(u: Unraveling) -> float:
    """Operator norm of L^dag L (largest eigenvalue, closed form for 2x2)."""
    ldl = u.jump.conj().T @ u.jump
    mean = 0.5 * (ldl[0, 0].real + ldl[1, 1].real)
    radius = math.hypot(0.5 * (ldl[0, 0].real - ldl[1, 1].real), abs(ldl[0, 1]))
    return mean + radius


def _check_step(u: Unraveling, dt: float) -> None:
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ValueError(f"dt must be finite and > 0, got {dt}")
    bound = _jump_norm_bound(u)
    if bound > 0.0 and dt > MAX_STEP_JUMP_PROBABILITY / bound:
        raise ValueError(
            f"dt = {dt:g} too coarse: worst-case step jump probability "
            f"{dt * bound:.3g} exceeds {MAX_STEP_JUMP_PROBABILITY}; "
            f"need dt <= {MAX_STEP_JUMP_PROBABILITY / bound:.3g}"
        )


def _density_eigensystem(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvector columns of a 2x2 density matrix."""
    a = rho[0, 0].real
    d = rho[1, 1].real
    b = rho[0, 1]
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(b))
    lam = np.array([mean + radius, mean - radius])
    lam = np.clip(lam, 0.0, 1.0)
    vecs = np.empty((2, 2), dtype=np.complex128)
    if abs(b) > 1e-14 * max(1.0, abs(a) + abs(d)):
        for i in range(2):
            v = np.array([b, lam[i] - a], dtype=np.complex128)
            vecs[:, i] = v / np.linalg.norm(v)
    else:
        order = [0, 1] if a >= d else [1, 0]
        vecs[:, 0] = np.eye(2)[:, order[0]]
        vecs[:, 1] = np.eye(2)[:, order[1]]
    return lam, vecs


def _initial_ensemble(psi0) -> tuple[np.ndarray, np.ndarray, float]:
    """Normalize an initial-state spec into (state_a, state_b, prob_a).

    Pure inputs (2-vectors, or None for the ground state) give prob_a = 1;
    a 2x2 density matrix is resolved into its eigen-ensemble, from which
    each trajectory samples its starting pure state.
    """
    arr = np.asarray([1.0, 0.0] if psi0 is None else psi0, dtype=np.complex128)
    if arr.shape == (2, 2):
        from .liouville import check_density_matrix

        rho = check_density_matrix(arr, tol=1e-9)
        lam, vecs = _density_eigensystem(rho)
        return vecs[:, 0], vecs[:, 1], float(lam[0])
    psi = arr.ravel()
    if psi.size != 2 or not np.all(np.isfinite(psi.view(np.float64))):
        raise ValueError("initial state must be a finite 2-component vector "
                         "or a 2x2 density matrix")
    norm = float(np.linalg.norm(psi))
    if norm == 0.0:
        raise ValueError("initial state must be nonzero")
    psi = psi / norm
    return psi, psi, 1.0


def _run_batch(
    u: Unraveling,
    n_steps: int,
    dt: float,
    rngs: list[Generator],
    psi0,
    collect_times: bool = False,
    snapshot_steps: dict[int, np.ndarray] | None = None,
):
    """Advance a batch of trajectories through ``n_steps`` fixed steps.

    All state updates are elementwise, so results are independent of how
    trajectories are batched; uniform variates are drawn per trajectory
    from its own stream in time chunks (stream-equivalent to step-by-step
    draws).  A mixed initial state consumes one extra uniform per
    trajectory to sample the starting pure state from its eigen-ensemble.
    ``snapshot_steps`` maps global step indices to 2x2 arrays accumulating
    sums of |psi><psi| over the batch.
    """
    prop = linalg.expm(-1j * dt * u.effective_hamiltonian())
    u00, u01, u10, u11 = prop.ravel()
    l00, l01, l10, l11 = u.jump.ravel()
    m = len(rngs)
    state_a, state_b, prob_a = _initial_ensemble(psi0)
    if prob_a >= 1.0:
        s0 = np.full(m, state_a[0], dtype=np.complex128)
        s1 = np.full(m, state_a[1], dtype=np.complex128)
    else:
        pick_a = np.array([rng.random() < prob_a for rng in rngs])
        s0 = np.where(pick_a, state_a[0], state_b[0])
        s1 = np.where(pick_a, state_a[1], state_b[1])
    counts = np.zeros(m, dtype=np.int64)
    times: list[list[float]] | None = [[] for _ in range(m)] if collect_times else None

    def snapshot(step: int) -> None:
        acc = snapshot_steps.get(step)
        if acc is not None:
            acc[0, 0] += np.sum(s0 * s0.conj())
            acc[0, 1] += np.sum(s0 * s1.conj())
            acc[1, 0] += np.sum(s1 * s0.conj())
            acc[1, 1] += np.sum(s1 * s1.conj())

    if snapshot_steps is not None:
        snapshot(0)
    chunk = max(16, min(4096, _RANDOM_BUFFER_ELEMENTS // max(m, 1)))
    done = 0
    while done < n_steps:
        width = min(chunk, n_steps - done)
        r = np.empty((m, width), dtype=np.float64)
        for i, rng in enumerate(rngs):
            r[i, :] = rng.random(width)
        for j in range(width):
            a0 = u00 * s0 + u01 * s1
            a1 = u10 * s0 + u11 * s1
            norm2 = a0.real**2 + a0.imag**2 + a1.real**2 + a1.imag**2
            idx = np.nonzero(r[:, j] < 1.0 - norm2)[0]
            if idx.size:
                b0 = l00 * s0[idx] + l01 * s1[idx]
                b1 = l10 * s0[idx] + l11 * s1[idx]
                jn = np.sqrt(b0.real**2 + b0.imag**2 + b1.real**2 + b1.imag**2)
                if np.any(jn == 0.0):
                    raise RuntimeError(
                        "jump operator annihilated the state at a jump event; "
                        "step probability bookkeeping is inconsistent"
                    )
                a0[idx] = b0 / jn
                a1[idx] = b1 / jn
                norm2[idx] = 1.0
                counts[idx] += 1
                if times is not None:
                    t_click = (done + j + 1) * dt
                    for i in idx:
                        times[i].append(t_click)
            rn = np.sqrt(norm2)
            s0 = a0 / rn
            s1 = a1 / rn
            if snapshot_steps is not None:
                snapshot(done + j + 1)
        done += width
    return counts, (s0, s1), times


def simulate_trajectory(
    u: Unraveling, t: float, dt: float, seed: int, psi0=None
) -> TrajectoryRecord:
    """One quantum-jump trajectory, deterministic in (u, t, dt, seed).

    The initial state defaults to the ground state |g>; a 2x2 density
    matrix is accepted, in which case the starting pure state is sampled
    from its eigen-ensemble using this trajectory's stream.
    """
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"duration must be finite and >= 0, got {t}")
    _check_step(u, dt)
    n_steps = int(round(t / dt))
    rng = Generator(Philox(key=int(seed)))
    counts, (s0, s1), times = _run_batch(
        u, n_steps, dt, [rng], psi0, collect_times=True
    )
    assert times is not None and counts[0] == len(times[0])
    return TrajectoryRecord(
        jump_times=np.array(times[0], dtype=np.float64),
        final_state=np.array([s0[0], s1[0]], dtype=np.complex128),
        seed=int(seed),
        t=n_steps * dt,
        dt=dt,
    )


def _bootstrap_errors(
    counts: np.ndarray, t: float, master_seed: int
) -> tuple[float, float | None]:
    """Nonparametric bootstrap standard errors for k_hat and q_hat."""
    rng = Generator(Philox(SeedSequence((int(master_seed), _BOOTSTRAP_TAG))))
    n = counts.size
    idx = rng.integers(0, n, size=(BOOTSTRAP_RESAMPLES, n))
    resampled = counts[idx]
    means = resampled.mean(axis=1)
    se_k = float(np.std(means / t, ddof=1))
    valid = means > 0.0
    if np.count_nonzero(valid) < 2:
        return se_k, None
    variances = resampled[valid].var(axis=1, ddof=1)
    q_vals = variances / means[valid] - 1.0
    return se_k, float(np.std(q_vals, ddof=1))


def ensemble_statistics(
    u: Unraveling,
    t: float,
    dt: float,
    n_traj: int,
    master_seed: int,
    psi0=None,
) -> EnsembleStatistics:
    """Click statistics over an ensemble of independent trajectories.

    k_hat = mean(K)/t and q_hat = var(K)/mean(K) - 1 (unbiased variance),
    with bootstrap standard errors.  Trajectory seeds derive from
    (master_seed, index), so the result does not depend on batching.
    ``psi0`` may be a pure 2-vector (default ground state) or a 2x2
    density matrix sampled per trajectory.
    """
    if n_traj < 2:
        raise ValueError(f"need at least 2 trajectories, got {n_traj}")
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"duration must be finite and >= 0, got {t}")
    _check_step(u, dt)
    n_steps = int(round(t / dt))
    duration = n_steps * dt
    rngs = [
        Generator(Philox(key=int(s))) for s in trajectory_seeds(master_seed, n_traj)
    ]
    counts, _, _ = _run_batch(u, n_steps, dt, rngs, psi0)

    hist_map: dict[int, int] = {}
    for k in counts:
        hist_map[int(k)] = hist_map.get(int(k), 0) + 1
    hist = CountHistogram(counts=hist_map, n_traj=n_traj, t=duration)

    mean = float(counts.mean())
    k_hat = mean / duration if duration > 0.0 else 0.0
    if mean > 0.0:
        q_hat = float(counts.var(ddof=1)) / mean - 1.0
    else:
        q_hat = None
    se_k, se_q = _bootstrap_errors(counts, duration if duration > 0 else 1.0,
                                   master_seed)
    if q_hat is None:
        se_q = None
    return EnsembleStatistics(
        k_hat=k_hat, q_hat=q_hat, histogram=hist, se_k=se_k, se_q=se_q
    )


def average_conditional_density(
    u: Unraveling,
    times,
    dt: float,
    n_traj: int,
    master_seed: int,
    psi0=None,
) -> list[np.ndarray]:
    """Ensemble averages of |psi><psi| at the requested times.

    Averaging the conditional pure states over trajectories recovers the
    unconditional master-equation state up to sampling noise; each
    requested time is rounded to the nearest whole step.
    """
    if n_traj < 1:
        raise ValueError(f"need at least 1 trajectory, got {n_traj}")
    _check_step(u, dt)
    t_list = [float(tv) for tv in np.atleast_1d(np.asarray(times, dtype=np.float64))]
    if not t_list or min(t_list) < 0.0:
        raise ValueError("snapshot times must be non-empty and >= 0")
    step_of = {tv: int(round(tv / dt)) for tv in t_list}
    snapshot_steps = {
        step: np.zeros((2, 2), dtype=np.complex128) for step in set(step_of.values())
    }
    rngs = [
        Generator(Philox(key=int(s))) for s in trajectory_seeds(master_seed, n_traj)
    ]
    _run_batch(
        u, max(snapshot_steps), dt, rngs, psi0, snapshot_steps=snapshot_steps
    )
    return [snapshot_steps[step_of[tv]] / n_traj for tv in t_list]


def biased_statistics(hist: CountHistogram, s: float) -> BiasedStatistics:
    """Activity and Mandel parameter of the exp(-sK)-reweighted ensemble.

    Weights are applied to the empirical distribution; the effective sample
    size (sum w)^2 / sum w^2 quantifies how much of the ensemble actually
    supports the biased estimate, and values below 10 raise since the
    estimates would be meaningless.
    """
    if hist.n_traj < 1 or not hist.counts:
        raise ValueError("histogram is empty")
    ks, ns = hist.occurrences()
    kref = float(ks.min() if s >= 0.0 else ks.max())
    w = np.exp(-s * (ks - kref))
    w1 = float(np.sum(ns * w))
    w2 = float(np.sum(ns * w * w))
    ess = w1 * w1 / w2
    if ess < 10.0:
        raise ValueError(
            f"effective sample size {ess:.2f} < 10 at s = {s:g}; "
            f"the reweighted estimate is unreliable (use more trajectories "
            f"or smaller |s|)"
        )
    m1 = float(np.sum(ns * w * ks)) / w1
    m2 = float(np.sum(ns * w * ks.astype(np.float64) ** 2)) / w1
    k_s = m1 / hist.t if hist.t > 0.0 else 0.0
    q_s = (m2 - m1 * m1) / m1 - 1.0 if m1 > 0.0 else None
    return BiasedStatistics(k_s=k_s, q_s=q_s, effective_sample_size=ess)


def write_histogram_csv(hist: CountHistogram, path) -> None:
    """Serialize a histogram as CSV with columns ``K,count``.

    Rows run contiguously from K = 0 to the largest observed count, with
    explicit zeros for unobserved K.
    """
    k_top = max(hist.counts) if hist.counts else 0
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("K,count\n")
        for k in range(k_top + 1):
            fh.write(f"{k},{hist.counts.get(k, 0)}\n")
