"""Coupling by parallel displacement, step by step and in bulk.

Two diffusions share one Brownian motion: the second receives the
tangent noise parallel-transported along the joining geodesic plus an
attracting drift scheduled to force a meeting before the horizon.  The
change of measure that removes the drift is tracked exactly, so E R = 1
is a built-in identity and E R log R measures the entropy the coupling
spends, which the closed-form bound must dominate.
"""

import math

import numpy as np

from logharnack import coupling as C
from logharnack import geometry as G

SEED = 42

print("=" * 70)
print("1. One pair on the hyperbolic plane, watched closely")
print("=" * 70)
M = G.Hyperbolic()
cfg = C.standard_coupling_config(M, [0.0, math.exp(0.3)], [0.0, 1.0], T=1.0, h=1e-3)
print(f"curvature bound on the enlarged domain K = {cfg.K_D_rho:.3f}")
print(f"reference-function constant c_D        = {cfg.c_D_phi:.3f}")
print(f"detection radius                        = {cfg.eps_couple:.4f}")
state = C.CoupledPathState(X=cfg.x, Y=cfg.y, rho=cfg.rho0)
rng = np.random.default_rng(SEED)
k = 0
while state.theta == C.THETA_NONE:
    state = C.step_coupled(M, state, cfg, rng.standard_normal(M.dim))
    k += 1
    if k % 100 == 0 or state.theta != C.THETA_NONE:
        print(f"  step {k:4d}  t = {state.t:.3f}  rho = {state.rho:.5f}  log R = {state.log_R:+.4f}")
print(f"stopped by: {C.THETA_NAMES[state.theta]} (coupled = {state.coupled})")

print()
print("=" * 70)
print("2. Ensemble diagnostics across the curved variants")
print("=" * 70)
sphere = G.Sphere(2, 1.0)
y_s = np.array([0.0, 0.0, 1.0])
x_s = sphere.exp(y_s, 0.3 * sphere.frame(y_s)[0])
configs = [
    ("flat line   ", G.Euclidean(1), np.array([0.0]), np.array([0.3]), 1.0),
    ("sphere      ", sphere, x_s, y_s, 0.5),
    ("hyperbolic  ", G.Hyperbolic(), np.array([0.0, math.exp(0.3)]), np.array([0.0, 1.0]), 1.0),
]
print(f"{'variant':14s} {'E R':>18s} {'E R log R':>12s} {'bound':>8s} {'E[R 1_coupled]':>15s}")
for name, M, x, y, T in configs:
    cfg = C.standard_coupling_config(M, x, y, T=T, h=1e-3)
    diag = C.run_coupling(M, cfg, 50_000, master_seed=SEED)
    print(
        f"{name:14s} {diag.e_r.mean:9.4f} +- {diag.e_r.stderr:.4f}"
        f" {diag.e_rlogr.mean:12.4f} {diag.entropy_bound:8.2f}"
        f" {diag.coupling_weighted.mean:15.4f}"
    )

print()
print("=" * 70)
print("3. Refining the step size sharpens the coupling")
print("=" * 70)
M = G.Euclidean(1)
for h in (4e-3, 1e-3, 2.5e-4):
    cfg = C.standard_coupling_config(M, [0.0], [0.3], T=1.0, h=h)
    diag = C.run_coupling(M, cfg, 20_000, master_seed=SEED)
    print(f"h = {h:<8}: weighted coupling probability = {diag.coupling_weighted.mean:.5f}")

print()
print("=" * 70)
print("4. The measure change really produces the law started at y")
print("=" * 70)
from logharnack import estimators as E  # noqa: E402

f = E.one_plus_bump([0.3], 0.8, b=0.6)
cfg = C.standard_coupling_config(M, [0.0], [0.3], T=0.5, h=1e-3)
diag, vals = C.run_coupling(M, cfg, 50_000, master_seed=SEED, return_values=True, terminal_fn=f)
w = np.where(vals["coupled"], vals["R"] * np.nan_to_num(vals["terminal"]), 0.0)
print(f"E[R f(X_T); coupled]  = {float(np.mean(w)):.5f}")
print(f"P_T f(y) by quadrature = {E.oracle_semigroup(M, [0.3], 0.5, f):.5f}")
print("(the reweighted merged point reproduces the semigroup at y)")
