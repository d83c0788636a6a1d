"""Coupling by parallel displacement with explicit Girsanov accounting.

The pair (X, Y) is driven by one Brownian motion: X takes the plain
diffusion step, Y takes the same tangent noise parallel-transported along
the minimal geodesic plus an attracting drift of size sqrt(xi1^2 + xi2^2)
toward X.  The drift xi1 follows the deterministic deadline schedule
built from the curvature bound on the enlarged domain; xi2 ~ rho / phi^2
activates near the domain boundary so the pair couples before Y can reach
it.  The change-of-measure density R is accumulated exactly for the drift
actually applied, so E R = 1 holds step by step by construction.

A pair stops at the first of: Y reaching the domain boundary, X leaving
the enlarged domain, coupling (rho below the detection radius, then Y is
snapped onto X), or the time horizon.  log R freezes at that moment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .diffusion import _advance
from .geometry import ModelSpace
from .local_bounds import (
    DomainSpec,
    ReferenceFunction,
    c_D,
    cosine_reference,
    enlarged_K,
    entropy_gain,
    harnack_rate,
    K_ZERO_TOL,
)
from .rng import BLOCK_SIZE, path_blocks, stream
from .stats import MonteCarloEstimate, estimate_from_values

__all__ = [
    "DomainBoundaryReached",
    "CouplingConfig",
    "CoupledPathState",
    "CouplingDiagnostics",
    "standard_coupling_config",
    "xi1",
    "xi2",
    "step_coupled",
    "run_coupling",
    "coupling_entropy_bound",
]

# xi2 is capped (and the pair flagged boundary-degenerate) below this phi.
PHI_CAP = 1e-4

THETA_NONE = 0
THETA_BOUNDARY_Y = 1  # tau_D(y): Y reached the domain boundary
THETA_EXIT_X = 2      # tau_{D(x,y)}(x): X left the enlarged domain
THETA_COUPLED = 3     # tau: coupling
THETA_HORIZON = 4     # T

THETA_NAMES = {
    THETA_NONE: "running",
    THETA_BOUNDARY_Y: "tau_D_y",
    THETA_EXIT_X: "tau_Dxy_x",
    THETA_COUPLED: "coupled",
    THETA_HORIZON: "horizon",
}


class DomainBoundaryReached(RuntimeError):
    pass


@dataclass
class CouplingConfig:
    """Frozen data of one coupled run."""

    x: np.ndarray
    y: np.ndarray
    T: float
    D: DomainSpec
    phi: ReferenceFunction
    K_D_rho: float
    c_D_phi: float
    eps_couple: float
    h: float
    rho0: float = 0.0
    phi_at_y: float = 1.0
    phi_floor: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.T <= 0 or self.h <= 0 or self.h > self.T:
            raise ValueError("need 0 < h <= T")
        if self.eps_couple > 10.0 * math.sqrt(2.0 * self.h):
            raise ValueError("eps_couple must stay within 10 sqrt(2h)")
        if self.phi_floor == 0.0:
            self.phi_floor = 0.25 * np.pi * self.eps_couple

    @property
    def exit_radius(self) -> float:
        """Radius of the enlarged domain that stops X."""
        return self.D.radius + self.rho0


def standard_coupling_config(
    M: ModelSpace,
    x,
    y,
    T: float,
    h: float,
    *,
    domain: Optional[DomainSpec] = None,
    phi: Optional[ReferenceFunction] = None,
    eps_couple: Optional[float] = None,
) -> CouplingConfig:
    """Config with the defaults used throughout: D = B(y, 1), the cosine
    reference, constants from the enlarged-domain curvature supremum.

    The detection radius is 3 sqrt(2h) capped at a quarter of the initial
    separation so that nearby starting pairs are not born coupled.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rho0 = float(M.distance(x, y))
    if domain is None:
        domain = DomainSpec(y, 1.0)
    if not domain.contains(M, y):
        raise ValueError("y must lie inside the domain")
    if phi is None:
        phi = cosine_reference(M, y, radius=domain.radius)
    if eps_couple is None:
        # capped at a quarter of the separation so nearby pairs are not
        # born coupled; x = y is the legitimate degenerate case
        eps_couple = 3.0 * math.sqrt(2.0 * h)
        if rho0 > 0:
            eps_couple = min(eps_couple, rho0 / 4.0)
    cfg = CouplingConfig(
        x=x,
        y=y,
        T=T,
        D=domain,
        phi=phi,
        K_D_rho=enlarged_K(M, x, y, domain),
        c_D_phi=c_D(M, phi),
        eps_couple=eps_couple,
        h=h,
        rho0=rho0,
        phi_at_y=float(phi.phi(y[None, :])[0]),
    )
    return cfg


@dataclass
class CoupledPathState:
    """State of one coupled pair."""

    X: np.ndarray
    Y: np.ndarray
    rho: float
    log_R: float = 0.0
    l: float = 0.0
    l_tilde: float = 0.0
    t: float = 0.0
    theta: int = THETA_NONE
    coupled: bool = False
    flagged: bool = False


def xi1(t, cfg: CouplingConfig):
    """Deadline drift  2 K e^{-K t} / (1 - e^{-2 K T}) * rho(x, y), with
    the K -> 0 limit rho(x, y) / T.  The caller zeroes it after
    coupling."""
    K, T = cfg.K_D_rho, cfg.T
    t = np.asarray(t, dtype=float)
    if abs(K) < K_ZERO_TOL:
        return np.broadcast_to(cfg.rho0 / T, t.shape).copy() if t.shape else cfg.rho0 / T
    return 2.0 * K * np.exp(-K * t) / (1.0 - math.exp(-2.0 * K * T)) * cfg.rho0


def xi2(state: CoupledPathState, cfg: CouplingConfig) -> float:
    """Boundary-avoiding drift  2 c_D(phi) rho(X, Y) / phi(Y)^2."""
    phi_y = float(cfg.phi.phi(np.asarray(state.Y)[None, :])[0])
    if phi_y <= 0:
        raise DomainBoundaryReached("phi(Y) <= 0: Y has reached the domain boundary")
    if state.rho == 0.0:
        return 0.0
    return 2.0 * cfg.c_D_phi * state.rho / phi_y**2


def coupling_entropy_bound(cfg: CouplingConfig) -> float:
    """The closed-form bound on E R log R for the run's constants."""
    K, T = cfg.K_D_rho, cfg.T
    return 0.5 * cfg.rho0**2 * (
        harnack_rate(K, T)
        + cfg.c_D_phi**2 * entropy_gain(K, T) / cfg.phi_at_y**4
    )


# ----------------------------------------------------------------------
# Stepping kernel
# ----------------------------------------------------------------------


def _xi1_rate(t, cfg):
    K, T = cfg.K_D_rho, cfg.T
    if abs(K) < K_ZERO_TOL:
        return np.full_like(np.asarray(t, dtype=float), 1.0 / T)
    return 2.0 * K * np.exp(-K * np.asarray(t, dtype=float)) / (1.0 - math.exp(-2.0 * K * T))


def _coupled_step_arrays(M, cfg, X, Y, logR, l, lt, t, xi, flagged):
    """Advance every supplied pair by one step (no stopping logic)."""
    h = cfg.h
    rho = M.distance(X, Y)
    phi_y = cfg.phi.phi(Y)
    flagged = flagged | (phi_y < PHI_CAP)
    phi_eff = np.maximum(phi_y, PHI_CAP)

    x1 = _xi1_rate(t, cfg) * cfg.rho0
    x2 = 2.0 * cfg.c_D_phi * rho / phi_eff**2
    # never move Y past X within one explicit step; R stays the exact
    # density of the drift actually applied
    a = np.minimum(np.sqrt(x1**2 + x2**2), rho / h)

    G = M.tangent_from_frame(X, xi)  # realisation of Phi dB, chart components
    vX = math.sqrt(2.0 * h) * G + h * M.drift(X)
    Xn = M.exp(X, vX)
    dl = np.zeros(X.shape[0])
    if M.has_boundary:
        Xn, dl = M.reflect(Xn)

    GY = M.transport(X, Y, G)
    toward = M.grad_distance(X, Y)  # unit at Y pointing away from X
    vY = math.sqrt(2.0 * h) * GY + h * (M.drift(Y) - a[:, None] * toward)
    Yn = M.exp(Y, vY)
    dlt = np.zeros(Y.shape[0])
    if M.has_boundary:
        Yn, dlt = M.reflect(Yn)

    # Girsanov increment for eta = (a / sqrt 2) * (unit at X away from Y):
    # <eta, Phi dB> in frame components is eta_i xi_i sqrt(h).
    eta = (a / math.sqrt(2.0))[:, None] * M.frame_components(X, M.grad_distance(Y, X))
    dlogR = -math.sqrt(h) * np.sum(eta * xi, axis=-1) - 0.5 * h * np.sum(eta**2, axis=-1)

    return Xn, Yn, logR + dlogR, l + dl, lt + dlt, flagged


def step_coupled(M: ModelSpace, state: CoupledPathState, cfg: CouplingConfig, noise) -> CoupledPathState:
    """Advance a single coupled pair by one step with the given noise and
    apply the stopping checks in the fixed order: boundary of D for Y,
    exit of the enlarged domain for X, coupling, horizon."""
    if state.theta != THETA_NONE:
        raise ValueError("pair already stopped")
    xi = np.asarray(noise, dtype=float)[None, :]
    X = np.asarray(state.X, dtype=float)[None, :]
    Y = np.asarray(state.Y, dtype=float)[None, :]
    flagged = np.array([state.flagged])
    Xn, Yn, logR, l, lt, flagged = _coupled_step_arrays(
        M, cfg, X, Y, np.array([state.log_R]), np.array([state.l]),
        np.array([state.l_tilde]), np.array([state.t]), xi, flagged
    )
    t_new = state.t + cfg.h
    rho_new = float(M.distance(Xn, Yn)[0])
    theta = THETA_NONE
    coupled = state.coupled
    phi_new = float(cfg.phi.phi(Yn)[0])
    if phi_new <= cfg.phi_floor or not cfg.D.contains(M, Yn)[0]:
        theta = THETA_BOUNDARY_Y
    elif float(M.distance(cfg.D.center, Xn)[0]) >= cfg.exit_radius:
        theta = THETA_EXIT_X
    elif rho_new <= cfg.eps_couple:
        theta = THETA_COUPLED
        coupled = True
        Yn = Xn.copy()
        rho_new = 0.0
    elif t_new >= cfg.T - 1e-12:
        theta = THETA_HORIZON
    return CoupledPathState(
        X=Xn[0],
        Y=Yn[0],
        rho=rho_new,
        log_R=float(logR[0]),
        l=float(l[0]),
        l_tilde=float(lt[0]),
        t=t_new,
        theta=theta,
        coupled=coupled,
        flagged=bool(flagged[0]),
    )


# ----------------------------------------------------------------------
# Ensemble driver and diagnostics
# ----------------------------------------------------------------------


@dataclass
class CouplingDiagnostics:
    """Monte Carlo summary of a coupled run."""

    e_r: MonteCarloEstimate
    e_rlogr: MonteCarloEstimate
    entropy_bound: float
    coupling_weighted: MonteCarloEstimate
    coupled_fraction: float
    flagged_fraction: float
    theta_counts: dict
    max_rho_excess: float
    n: int
    seed: int

    def to_row(self) -> dict:
        return {
            "e_r": self.e_r.mean,
            "e_r_stderr": self.e_r.stderr,
            "e_rlogr": self.e_rlogr.mean,
            "e_rlogr_stderr": self.e_rlogr.stderr,
            "entropy_bound": self.entropy_bound,
            "coupling_weighted": self.coupling_weighted.mean,
            "coupling_weighted_stderr": self.coupling_weighted.stderr,
            "coupled_fraction": self.coupled_fraction,
            "flagged_fraction": self.flagged_fraction,
            "max_rho_excess": self.max_rho_excess,
            "n": self.n,
            "seed": self.seed,
        }


def run_coupling(
    M: ModelSpace,
    cfg: CouplingConfig,
    n_pairs: int,
    master_seed: int = 0,
    *,
    stream_id: int = 0,
    block_size: int = BLOCK_SIZE,
    return_values: bool = False,
    terminal_fn=None,
):
    """Simulate n_pairs independent coupled pairs and report the Girsanov
    diagnostics (E R, E R log R with its closed-form bound, the weighted
    probability of coupling before the competing stopping events).

    With ``terminal_fn`` the merged point of every coupled pair keeps
    evolving as a plain diffusion to the horizon and fn(X_T) is recorded;
    under the change of measure E[R fn(X_T); coupled] reproduces the
    semigroup started at y up to the coupling defect, which is the
    identity the whole construction exists for.
    """
    n_steps = max(1, math.ceil(cfg.T / cfg.h - 1e-12))

    all_logR = np.empty(n_pairs)
    all_coupled = np.empty(n_pairs, dtype=bool)
    all_theta = np.empty(n_pairs, dtype=np.int8)
    all_flagged = np.empty(n_pairs, dtype=bool)
    all_terminal = np.full(n_pairs, np.nan)
    max_rho_excess = -np.inf

    for b, lo, hi in path_blocks(n_pairs, block_size):
        rng = stream(master_seed, stream_id, b)
        bn = hi - lo
        X = np.broadcast_to(cfg.x, (bn, M.chart_dim)).copy()
        Y = np.broadcast_to(cfg.y, (bn, M.chart_dim)).copy()
        logR = np.zeros(bn)
        l = np.zeros(bn)
        lt = np.zeros(bn)
        flagged = np.zeros(bn, dtype=bool)
        theta = np.full(bn, THETA_NONE, dtype=np.int8)
        coupled = np.zeros(bn, dtype=bool)

        # the stopping cascade also applies to the initial state: pairs
        # born within the detection radius are coupled at t = 0
        if cfg.rho0 <= cfg.eps_couple:
            theta[:] = THETA_COUPLED
            coupled[:] = True
            Y[:] = X

        for k in range(n_steps):
            idx = np.flatnonzero(theta == THETA_NONE)
            if terminal_fn is not None:
                merged = np.flatnonzero(theta == THETA_COUPLED)
            if idx.size == 0 and (terminal_fn is None or merged.size == 0):
                break
            xi = rng.standard_normal((idx.size, M.dim))
            t_now = k * cfg.h
            if idx.size:
                Xs, Ys, lRs, ls, lts, fl = _coupled_step_arrays(
                    M, cfg, X[idx], Y[idx], logR[idx], l[idx], lt[idx],
                    np.full(idx.size, t_now), xi, flagged[idx]
                )
                rho_new = M.distance(Xs, Ys)
                max_rho_excess = max(max_rho_excess, float(np.max(rho_new)) - cfg.rho0)
                phi_new = cfg.phi.phi(Ys)
                fire_bdry = (phi_new <= cfg.phi_floor) | ~cfg.D.contains(M, Ys)
                fire_exit = ~fire_bdry & (M.distance(cfg.D.center, Xs) >= cfg.exit_radius)
                fire_couple = ~fire_bdry & ~fire_exit & (rho_new <= cfg.eps_couple)
                fire_T = ~fire_bdry & ~fire_exit & ~fire_couple & (t_now + cfg.h >= cfg.T - 1e-12)

                Ys = np.where(fire_couple[:, None], Xs, Ys)
                X[idx], Y[idx] = Xs, Ys
                logR[idx], l[idx], lt[idx], flagged[idx] = lRs, ls, lts, fl
                th = np.where(
                    fire_bdry, THETA_BOUNDARY_Y,
                    np.where(fire_exit, THETA_EXIT_X,
                             np.where(fire_couple, THETA_COUPLED,
                                      np.where(fire_T, THETA_HORIZON, THETA_NONE))),
                ).astype(np.int8)
                theta[idx] = th
                coupled[idx] |= fire_couple
            if terminal_fn is not None and merged.size:
                xim = rng.standard_normal((merged.size, M.dim))
                Xm, _, _ = _advance(M, X[merged], cfg.h, xim, np.ones(merged.size, dtype=bool))
                X[merged] = Xm
                Y[merged] = Xm

        all_logR[lo:hi] = logR
        all_coupled[lo:hi] = coupled
        all_theta[lo:hi] = theta
        all_flagged[lo:hi] = flagged
        if terminal_fn is not None:
            vals = np.full(bn, np.nan)
            idxc = np.flatnonzero(coupled)
            if idxc.size:
                vals[idxc] = terminal_fn(X[idxc])
            all_terminal[lo:hi] = vals

    R = np.exp(all_logR)
    diag = CouplingDiagnostics(
        e_r=estimate_from_values(R, seed=master_seed),
        e_rlogr=estimate_from_values(R * all_logR, seed=master_seed),
        entropy_bound=coupling_entropy_bound(cfg),
        coupling_weighted=estimate_from_values(R * all_coupled, seed=master_seed),
        coupled_fraction=float(np.mean(all_coupled)),
        flagged_fraction=float(np.mean(all_flagged)),
        theta_counts={THETA_NAMES[k]: int(np.sum(all_theta == k)) for k in THETA_NAMES},
        max_rho_excess=float(max_rho_excess),
        n=n_pairs,
        seed=master_seed,
    )
    if return_values:
        out = {"R": R, "log_R": all_logR, "coupled": all_coupled, "theta": all_theta}
        if terminal_fn is not None:
            out["terminal"] = all_terminal
        return diag, out
    return diag
