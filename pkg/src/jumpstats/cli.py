"""Command-line front end.

Subcommands: ``scgf`` (counting statistics at given tilt values, JSON),
``sweep`` (an (s, alpha) grid of the shifted unraveling, CSV), ``traj``
(Monte Carlo ensemble: histogram CSV plus a JSON summary) and ``pk`` (the
exact count distribution, CSV).  Parameters come from flags or from a flat
JSON config file keyed by flag names; explicit flags win.  Exit codes:
0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import fcs, linalg, trajectories
from .liouville import excited_state, ground_state
from .model import AtomParams, shifted_unraveling

__all__ = ["GridSpec", "RunConfig", "parse_args", "run", "main"]

_NUMERIC_FAILURES = (
    ValueError,
    RuntimeError,
    OverflowError,
    FloatingPointError,
    OSError,
)

_DEFAULT_S_GRID = (-1.5, 1.5, 301)
_DEFAULT_ALPHA_SPAN = 2.0  # in units of sqrt(gamma)
_DEFAULT_ALPHA_STEPS = 201


@dataclass(frozen=True)
class GridSpec:
    """A uniform grid lo..hi with ``steps`` points (1-point grids need lo == hi)."""

    lo: float
    hi: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"grid needs steps >= 1, got {self.steps}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid endpoints must be finite")
        if self.steps == 1 and self.lo != self.hi:
            raise ValueError("a 1-point grid needs equal endpoints")
        if self.lo > self.hi:
            raise ValueError(f"grid endpoints out of order: {self.lo} > {self.hi}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameters of one CLI invocation."""

    command: str
    gamma: float
    omega: float
    alpha: float
    s_values: tuple[float, ...] | None
    s_grid: GridSpec | None
    alpha_grid: GridSpec | None
    t: float
    dt: float | None
    n_traj: int
    k_max: int | None
    master_seed: int
    init: str
    out: str | None
    dump_config: bool = False

    def params(self) -> AtomParams:
        return AtomParams(gamma=self.gamma, omega=self.omega, alpha=self.alpha)

    def resolve_s(self) -> np.ndarray:
        if self.s_values is not None:
            return np.asarray(self.s_values, dtype=np.float64)
        assert self.s_grid is not None
        return self.s_grid.values()


_FLAGS: tuple[tuple[str, type], ...] = (
    ("gamma", float),
    ("omega", float),
    ("alpha", float),
    ("s-min", float),
    ("s-max", float),
    ("s-steps", int),
    ("alpha-min", float),
    ("alpha-max", float),
    ("alpha-steps", int),
    ("t", float),
    ("dt", float),
    ("ntraj", int),
    ("kmax", int),
    ("seed", int),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumpstats",
        description="Photon-counting statistics of quantum-jump unravelings "
        "of a driven two-level emitter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "scgf": "counting statistics at given tilt values (JSON to stdout)",
        "sweep": "(s, alpha) grid of the shifted unraveling (CSV)",
        "traj": "Monte Carlo ensemble: histogram CSV and JSON summary",
        "pk": "exact count distribution P_t(K) (CSV)",
    }
    for name, text in helps.items():
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--s", default=None,
                         help="tilt value(s), comma separated")
        for flag, kind in _FLAGS:
            cmd.add_argument(f"--{flag}", type=kind, default=None)
        cmd.add_argument("--init", choices=("g", "e"), default=None,
                         help="initial state (ground or excited)")
        cmd.add_argument("--config", default=None,
                         help="flat JSON config file keyed by flag names")
        cmd.add_argument("--out", default=None, help="output path")
        cmd.add_argument("--dump-config", action="store_true",
                         help="print the effective config as JSON and exit")
    return parser


def _parse_s_list(raw, error) -> tuple[float, ...]:
    if isinstance(raw, (int, float)):
        values = [float(raw)]
    elif isinstance(raw, str):
        try:
            values = [float(part) for part in raw.split(",") if part.strip() != ""]
        except ValueError:
            error(f"cannot parse --s value {raw!r}")
        if not values:
            error("--s needs at least one value")
    elif isinstance(raw, (list, tuple)):
        try:
            values = [float(v) for v in raw]
        except (TypeError, ValueError):
            error(f"cannot parse s list {raw!r}")
    else:
        error(f"cannot parse s value {raw!r}")
    if not all(math.isfinite(v) for v in values):
        error("s values must be finite")
    return tuple(values)


def _load_config_file(path: str, error) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        error(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        error(f"malformed JSON in {path}: {exc}")
    if not isinstance(payload, dict):
        error(f"config file {path} must hold a JSON object")
    known = {flag for flag, _ in _FLAGS} | {"s", "init", "out"}
    out = {}
    for key, value in payload.items():
        name = key.replace("_", "-")
        if name not in known:
            error(f"unknown config key {key!r}")
        out[name] = value
    return out


def parse_args(argv=None) -> RunConfig:
    """Parse flags and optional config file into a ``RunConfig``.

    Usage problems (unknown flags, conflicting or malformed values) exit
    with code 2 and a message on standard error.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    error = parser.error

    file_cfg = _load_config_file(ns.config, error) if ns.config else {}

    def pick(flag: str, default=None):
        cli_val = getattr(ns, flag.replace("-", "_"))
        if cli_val is not None:
            return cli_val
        if flag in file_cfg:
            return file_cfg[flag]
        return default

    try:
        gamma = float(pick("gamma", 1.0))
        omega = float(pick("omega", 0.25))
        alpha = float(pick("alpha", 0.0))
        seed = int(pick("seed", 42))
        t = float(pick("t", 50.0))
        dt_raw = pick("dt")
        dt = None if dt_raw is None else float(dt_raw)
        n_traj = int(pick("ntraj", 1000))
        kmax_raw = pick("kmax")
        k_max = None if kmax_raw is None else int(kmax_raw)
        init = str(pick("init", "g"))
    except (TypeError, ValueError) as exc:
        error(f"invalid parameter value: {exc}")
    if init not in ("g", "e"):
        error(f"--init must be 'g' or 'e', got {init!r}")

    s_raw = pick("s")
    s_grid_given = any(pick(f) is not None for f in ("s-min", "s-max", "s-steps"))
    if s_raw is not None and s_grid_given:
        error("--s conflicts with --s-min/--s-max/--s-steps")
    a_grid_given = any(
        pick(f) is not None for f in ("alpha-min", "alpha-max", "alpha-steps")
    )
    if ns.alpha is not None and a_grid_given:
        error("--alpha conflicts with --alpha-min/--alpha-max/--alpha-steps")

    try:
        if s_raw is not None:
            s_values: tuple[float, ...] | None = _parse_s_list(s_raw, error)
            s_grid = None
        elif s_grid_given or ns.command == "sweep":
            s_values = None
            s_grid = GridSpec(
                lo=float(pick("s-min", _DEFAULT_S_GRID[0])),
                hi=float(pick("s-max", _DEFAULT_S_GRID[1])),
                steps=int(pick("s-steps", _DEFAULT_S_GRID[2])),
            )
        else:
            s_values = (0.0,)
            s_grid = None

        alpha_grid = None
        if ns.command == "sweep":
            if a_grid_given or not ("alpha" in file_cfg or ns.alpha is not None):
                span = _DEFAULT_ALPHA_SPAN * math.sqrt(gamma)
                alpha_grid = GridSpec(
                    lo=float(pick("alpha-min", -span)),
                    hi=float(pick("alpha-max", span)),
                    steps=int(pick("alpha-steps", _DEFAULT_ALPHA_STEPS)),
                )
            else:
                alpha_grid = GridSpec(lo=alpha, hi=alpha, steps=1)

        config = RunConfig(
            command=ns.command,
            gamma=gamma,
            omega=omega,
            alpha=alpha,
            s_values=s_values,
            s_grid=s_grid,
            alpha_grid=alpha_grid,
            t=t,
            dt=dt,
            n_traj=n_traj,
            k_max=k_max,
            master_seed=seed,
            init=init,
            out=ns.out if ns.out is not None else file_cfg.get("out"),
            dump_config=ns.dump_config,
        )
        config.params()  # validate physical parameters now, as a usage check
        if config.t < 0.0:
            raise ValueError(f"t must be >= 0, got {config.t}")
        if config.n_traj < 1:
            raise ValueError(f"ntraj must be >= 1, got {config.n_traj}")
    except (TypeError, ValueError) as exc:
        error(str(exc))
    return config


def _config_payload(config: RunConfig) -> dict:
    payload: dict = {
        "gamma": config.gamma,
        "omega": config.omega,
        "alpha": config.alpha,
        "seed": config.master_seed,
        "t": config.t,
        "ntraj": config.n_traj,
        "init": config.init,
    }
    if config.s_values is not None:
        payload["s"] = list(config.s_values)
    if config.s_grid is not None:
        payload["s-min"] = config.s_grid.lo
        payload["s-max"] = config.s_grid.hi
        payload["s-steps"] = config.s_grid.steps
    if config.alpha_grid is not None:
        payload["alpha-min"] = config.alpha_grid.lo
        payload["alpha-max"] = config.alpha_grid.hi
        payload["alpha-steps"] = config.alpha_grid.steps
    if config.dt is not None:
        payload["dt"] = config.dt
    if config.k_max is not None:
        payload["kmax"] = config.k_max
    if config.out is not None:
        payload["out"] = config.out
    return payload


def _num(x) -> float | None:
    """NaN-safe JSON number (NaN and None map to null)."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(x)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def _initial_density(config: RunConfig) -> np.ndarray:
    return excited_state() if config.init == "e" else ground_state()


def _initial_pure_state(config: RunConfig) -> np.ndarray:
    return (
        np.array([0.0, 1.0], dtype=np.complex128)
        if config.init == "e"
        else np.array([1.0, 0.0], dtype=np.complex128)
    )


def _run_scgf(config: RunConfig) -> int:
    u = shifted_unraveling(config.params())
    lines = []
    for s in config.resolve_s():
        cs = fcs.activity_mandel(u, float(s))
        lines.append(
            json.dumps(
                {
                    "s": cs.s,
                    "theta": cs.theta,
                    "k": cs.activity,
                    "Q": _num(cs.mandel_q),
                    "imag_residual": cs.imag_residual,
                }
            )
        )
    _emit("\n".join(lines) + "\n", config.out)
    return 0


def _run_sweep(config: RunConfig) -> int:
    assert config.alpha_grid is not None
    rows = fcs.sweep(
        config.params(), config.resolve_s(), config.alpha_grid.values()
    )
    out_lines = ["s,alpha,theta,k,Q,imag_residual"]
    out_lines.extend(
        ",".join(
            (_fmt(r.s), _fmt(r.alpha), _fmt(r.theta), _fmt(r.activity),
             _fmt(r.mandel_q), _fmt(r.imag_residual))
        )
        for r in rows
    )
    _emit("\n".join(out_lines) + "\n", config.out)
    for r in rows:
        if r.diagnostic is not None:
            print(
                f"warning: point s={r.s:g} alpha={r.alpha:g} failed: "
                f"{r.diagnostic}",
                file=sys.stderr,
            )
    return 0


def _run_traj(config: RunConfig) -> int:
    u = shifted_unraveling(config.params())
    dt = config.dt if config.dt is not None else trajectories.default_time_step(
        config.params()
    )
    ens = trajectories.ensemble_statistics(
        u,
        config.t,
        dt,
        config.n_traj,
        config.master_seed,
        psi0=_initial_pure_state(config),
    )
    hist_path = config.out if config.out is not None else "histogram.csv"
    trajectories.write_histogram_csv(ens.histogram, hist_path)
    biased = []
    for s in config.resolve_s():
        entry: dict = {"s": float(s)}
        try:
            bs = trajectories.biased_statistics(ens.histogram, float(s))
            entry.update(
                k_s=_num(bs.k_s),
                q_s=_num(bs.q_s),
                ess=_num(bs.effective_sample_size),
            )
        except ValueError as exc:
            entry["error"] = str(exc)
        biased.append(entry)
    summary = {
        "t": ens.histogram.t,
        "dt": dt,
        "n_traj": config.n_traj,
        "seed": config.master_seed,
        "k_hat": _num(ens.k_hat),
        "q_hat": _num(ens.q_hat),
        "se_k": _num(ens.se_k),
        "se_q": _num(ens.se_q),
        "histogram_path": hist_path,
        "biased": biased,
    }
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


def _run_pk(config: RunConfig) -> int:
    u = shifted_unraveling(config.params())
    rho0 = _initial_density(config)
    k_max = config.k_max
    if k_max is None:
        k0 = fcs.activity_mandel(u, 0.0).activity
        expected = k0 * config.t
        k_max = max(10, int(math.ceil(expected + 10.0 * math.sqrt(max(expected, 1.0)))))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", fcs.TruncationWarning)
        dist = fcs.counting_resolved_pk(u, config.t, k_max, rho0)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    lines = ["K,P"]
    lines.extend(
        f"{k},{_fmt(p)}" for k, p in enumerate(dist.probabilities)
    )
    _emit("\n".join(lines) + "\n", config.out)
    return 0


def run(config: RunConfig) -> int:
    """Execute a parsed invocation; returns the process exit code."""
    if config.dump_config:
        sys.stdout.write(json.dumps(_config_payload(config), indent=2) + "\n")
        return 0
    dispatch = {
        "scgf": _run_scgf,
        "sweep": _run_sweep,
        "traj": _run_traj,
        "pk": _run_pk,
    }
    try:
        return dispatch[config.command](config)
    except _NUMERIC_FAILURES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
