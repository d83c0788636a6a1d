"""Geodesic Euler simulation of the (reflecting) diffusion with generator
Laplace-Beltrami + Z.

One step moves the path to  exp_x( sqrt(2h) * frame * noise + h * Z(x) );
proposals that leave the chart through the boundary are mirrored back and
the overshoot feeds the boundary local time.  The explosive catalogue
variant additionally sub-steps when the drift displacement would exceed a
cap, and paths crossing the explosion threshold flip their ``alive`` flag
(the lifetime indicator of the semigroup).

Paths are independent; path blocks draw from counter-based streams keyed
by (master seed, stream id, block), so ensembles are bitwise reproducible
for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import ExplosiveDrift1D, ModelSpace
from .rng import BLOCK_SIZE, path_blocks, stream
from .stats import estimate_from_values

__all__ = [
    "PathConfig",
    "PathState",
    "step",
    "simulate_path",
    "simulate_ensemble",
    "local_time_profile",
]


@dataclass
class PathConfig:
    """Time stepping and noise-stream configuration for one run."""

    h: float
    T: float
    scheme: str = "geodesic-euler"
    master_seed: int = 0
    path_index: int = 0

    def __post_init__(self):
        if not (0 < self.h <= self.T):
            raise ValueError("need 0 < h <= T")
        if self.scheme != "geodesic-euler":
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.T / self.h - 1e-12))

    @property
    def h_eff(self) -> float:
        return self.T / self.n_steps


@dataclass
class PathState:
    """State of a single path: position, boundary local time, clock and
    the explosion indicator."""

    position: np.ndarray
    local_time: float = 0.0
    t: float = 0.0
    alive: bool = True
    exit_times: dict = field(default_factory=dict)


def _advance(M: ModelSpace, pos, h, xi, alive):
    """One geodesic Euler step for a batch.  Returns (positions,
    local-time increments, alive).  Dead paths are frozen."""
    if isinstance(M, ExplosiveDrift1D):
        return _advance_explosive(M, pos, h, xi, alive)
    v = math.sqrt(2.0 * h) * M.tangent_from_frame(pos, xi) + h * M.drift(pos)
    new = M.exp(pos, v)
    if M.has_boundary:
        new, dl = M.reflect(new)
    else:
        dl = np.zeros(pos.shape[:-1])
    if not np.all(alive):
        keep = alive[..., None]
        new = np.where(keep, new, pos)
        dl = np.where(alive, dl, 0.0)
    return new, dl, alive


def _advance_explosive(M: ExplosiveDrift1D, pos, h, xi, alive):
    """Splitting step for the cubic drift: exact drift flow, then noise.

    The drift ODE dx = x^3 dt integrates in closed form to
    x / sqrt(1 - 2 h x^2), which blows up within the step exactly when
    2 h x^2 >= 1; that event (or crossing the explosion threshold)
    flips the lifetime flag.  Near the origin the flow agrees with the
    Euler increment to O(h^2), and unlike Euler it has no stability cap
    on the drift displacement.
    """
    x = pos[..., 0]
    noise = math.sqrt(2.0 * h) * xi[..., 0]
    thr = M.explosion_threshold
    disc = 1.0 - 2.0 * h * x**2
    explodes = disc <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        flowed = x / np.sqrt(np.maximum(disc, 1e-300))
    prop = np.where(explodes, x, np.clip(flowed, -thr, thr) + noise)
    live = alive & ~explodes & (np.abs(prop) < thr)
    out = np.where(live, prop, x)[..., None]
    return out, np.zeros(pos.shape[:-1]), live


def step(M: ModelSpace, state: PathState, cfg: PathConfig, noise) -> PathState:
    """Advance a single path by one step with the supplied standard
    Gaussian noise vector.  Explosion is a state, not an error."""
    if not state.alive:
        raise ValueError("step requires a live path")
    pos = np.asarray(state.position, dtype=float)[None, :]
    xi = np.asarray(noise, dtype=float)[None, :]
    alive = np.array([True])
    new, dl, alive = _advance(M, pos, cfg.h, xi, alive)
    return PathState(
        position=new[0],
        local_time=state.local_time + float(dl[0]),
        t=state.t + cfg.h,
        alive=bool(alive[0]),
        exit_times=dict(state.exit_times),
    )


def simulate_ensemble(
    M: ModelSpace,
    x0,
    T: float,
    h: float,
    n_paths: int,
    master_seed: int,
    *,
    stream_id: int = 0,
    marks: Sequence[float] = (),
    stop_domain: Optional[tuple] = None,
    domains: Sequence[tuple] = (),
    block_size: int = BLOCK_SIZE,
):
    """Simulate n_paths independent copies up to time T.

    stop_domain=(center, r) freezes the local-time series at the first
    exit from B(center, r); ``domains`` is a list of (center, radius)
    whose first exit times are recorded.  ``marks`` are times at which
    (local_time, alive) snapshots are stored.

    Returns a dict with terminal positions / alive flags / local times,
    per-mark snapshots, exit times, and the effective step size.
    """
    cfg = PathConfig(h=h, T=T, master_seed=master_seed)
    n_steps, h_eff = cfg.n_steps, cfg.h_eff
    mark_steps = [min(n_steps, max(1, round(t / h_eff))) for t in marks]
    x0 = np.asarray(x0, dtype=float)

    out_pos = np.empty((n_paths, M.chart_dim))
    out_alive = np.empty(n_paths, dtype=bool)
    out_l = np.empty(n_paths)
    out_marks_l = np.empty((len(marks), n_paths))
    out_marks_alive = np.empty((len(marks), n_paths), dtype=bool)
    out_exit = np.full((len(domains), n_paths), np.inf)

    for b, lo, hi in path_blocks(n_paths, block_size):
        rng = stream(master_seed, stream_id, b)
        bn = hi - lo
        pos = np.broadcast_to(x0, (bn, M.chart_dim)).copy()
        alive = np.ones(bn, dtype=bool)
        l = np.zeros(bn)
        stopped = np.zeros(bn, dtype=bool)
        exited = np.zeros((len(domains), bn), dtype=bool)
        for kstep in range(n_steps):
            xi = rng.standard_normal((bn, M.dim))
            pos, dl, alive = _advance(M, pos, h_eff, xi, alive)
            if stop_domain is not None:
                l += np.where(stopped, 0.0, dl)
                c, r = stop_domain
                stopped |= M.distance(c, pos) >= r
            else:
                l += dl
            t_now = (kstep + 1) * h_eff
            for j, (c, r) in enumerate(domains):
                newly = ~exited[j] & (M.distance(c, pos) >= r)
                out_exit[j, lo:hi][newly] = t_now
                exited[j] |= newly
            for mi, ms in enumerate(mark_steps):
                if ms == kstep + 1:
                    out_marks_l[mi, lo:hi] = l
                    out_marks_alive[mi, lo:hi] = alive
        out_pos[lo:hi] = pos
        out_alive[lo:hi] = alive
        out_l[lo:hi] = l

    return {
        "positions": out_pos,
        "alive": out_alive,
        "local_time": out_l,
        "marks_local_time": out_marks_l,
        "marks_alive": out_marks_alive,
        "exit_times": out_exit,
        "h_eff": h_eff,
        "n_steps": n_steps,
    }


def simulate_path(
    M: ModelSpace,
    x,
    cfg: PathConfig,
    observables: Optional[dict] = None,
    trace_file=None,
):
    """Run one path and record the requested observables.

    observables: {"f": callable, "domains": [(tag, center, radius), ...]}.
    Returns (terminal PathState, records dict) where the terminal
    f-record is f(X_T) * 1_alive.  ``trace_file`` (a path or file-like)
    dumps the full trajectory as CSV rows "t, coords..., l, alive" for
    debugging; the path is the same one ensemble stream (master_seed,
    path_index) would produce.
    """
    observables = observables or {}
    domains = observables.get("domains", [])
    rng = stream(cfg.master_seed, cfg.path_index, 0)
    n_steps, h_eff = cfg.n_steps, cfg.h_eff

    pos = np.asarray(x, dtype=float)[None, :].copy()
    alive = np.ones(1, dtype=bool)
    l = 0.0
    exit_times = {tag: math.inf for (tag, _, _) in domains}

    trace = opened = None
    if trace_file is not None:
        trace = trace_file
        if not hasattr(trace, "write"):
            trace = opened = open(trace_file, "w")
        header = ",".join(["t"] + [f"x{i}" for i in range(M.chart_dim)] + ["l", "alive"])
        trace.write(header + "\n")
        trace.write(",".join(["0"] + [repr(float(v)) for v in pos[0]] + ["0.0", "1"]) + "\n")

    for k in range(n_steps):
        xi = rng.standard_normal((1, M.dim))
        pos, dl, alive = _advance(M, pos, h_eff, xi, alive)
        l += float(dl[0])
        t_now = (k + 1) * h_eff
        for tag, c, r in domains:
            if math.isinf(exit_times[tag]) and float(M.distance(c, pos)[0]) >= r:
                exit_times[tag] = t_now
        if trace is not None:
            trace.write(
                ",".join([repr(t_now)] + [repr(float(v)) for v in pos[0]] + [repr(l), str(int(alive[0]))]) + "\n"
            )
    if opened is not None:
        opened.close()

    state = PathState(
        position=pos[0],
        local_time=l,
        t=cfg.T,
        alive=bool(alive[0]),
        exit_times=exit_times,
    )
    records = {"local_time": state.local_time, "alive": state.alive}
    if "f" in observables:
        records["f"] = float(observables["f"](state.position[None, :])[0]) if state.alive else 0.0
    return state, records


def local_time_profile(
    M: ModelSpace,
    x,
    t_grid: Sequence[float],
    n_paths: int,
    h: float,
    master_seed: int,
    r: float = 1.0,
):
    """Monte Carlo estimates of E l_{t ^ sigma_r} on a time grid, where
    sigma_r is the first exit from the ball of radius r around the start.

    Returns (estimates, reference) with reference the flat-boundary value
    2 sqrt(t) / sqrt(pi).
    """
    if not M.has_boundary:
        raise ValueError("local_time_profile needs a boundary variant")
    t_grid = list(t_grid)
    res = simulate_ensemble(
        M,
        x,
        max(t_grid),
        h,
        n_paths,
        master_seed,
        marks=t_grid,
        stop_domain=(np.asarray(x, dtype=float), r),
    )
    ests = [estimate_from_values(res["marks_local_time"][i], seed=master_seed) for i in range(len(t_grid))]
    reference = [2.0 * math.sqrt(t) / math.sqrt(math.pi) for t in t_grid]
    return ests, reference
