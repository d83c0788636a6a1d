"""Independent numerical oracles used by the tests.

These deliberately avoid the library's closed-form code paths: geodesics
and parallel transport are integrated from the Christoffel symbols of the
upper half-plane metric, curvature is recovered from geodesic deviation,
and boundary-exit probabilities come from the classical reflection
series.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp


def hyperbolic_geodesic_ivp(x0, v0, length=1.0):
    """Integrate the half-plane geodesic ODE; returns the endpoint.

    Christoffels of (dx^2 + dy^2)/y^2:  G^x_xy = -1/y, G^y_xx = 1/y,
    G^y_yy = -1/y.
    """

    def rhs(_, state):
        x, y, vx, vy = state
        ax = 2.0 * vx * vy / y
        ay = (vy**2 - vx**2) / y
        return [vx, vy, ax, ay]

    sol = solve_ivp(rhs, (0.0, length), [x0[0], x0[1], v0[0], v0[1]],
                    rtol=1e-12, atol=1e-12, dense_output=True)
    return np.array(sol.y[:2, -1])


def hyperbolic_transport_ivp(x0, v_dir, w0, length=1.0):
    """Parallel-transport w0 along the geodesic with initial velocity
    v_dir by integrating dw/ds + Gamma(gamma')(w) = 0."""

    def rhs(_, state):
        x, y, vx, vy, wx, wy = state
        ax = 2.0 * vx * vy / y
        ay = (vy**2 - vx**2) / y
        # dw^x/ds = (vx wy + vy wx)/y ; dw^y/ds = (vy wy - vx wx)/y
        dwx = (vx * wy + vy * wx) / y
        dwy = (vy * wy - vx * wx) / y
        return [vx, vy, ax, ay, dwx, dwy]

    sol = solve_ivp(
        rhs,
        (0.0, length),
        [x0[0], x0[1], v_dir[0], v_dir[1], w0[0], w0[1]],
        rtol=1e-12,
        atol=1e-12,
    )
    return np.array(sol.y[:2, -1]), np.array(sol.y[4:, -1])


def curvature_from_deviation(M, x, u, w, t=0.2, delta=1e-5):
    """Sectional/Ricci curvature (surfaces) from geodesic deviation:
    |J(t)| = t - K t^3/6 + O(t^5); Richardson in t kills the t^2 error of
    the inverted estimate."""

    def estimate(tt):
        a = M.exp(x, tt * u)
        v2 = u + delta * w
        v2 = v2 / M.norm(x, v2)
        b = M.exp(x, tt * v2)
        dist = float(M.distance(a, b))
        return 6.0 * (delta * tt - dist) / (delta * tt**3)

    k_t = estimate(t)
    k_half = estimate(t / 2.0)
    return (4.0 * k_half - k_t) / 3.0


def bm_two_sided_exit_prob(t, r=1.0, terms=40):
    """P(sup_{s<=t} |X_s| >= r) for the driftless generator-Delta
    diffusion in 1-d (variance 2s), via the reflection eigen-series."""
    tau = 2.0 * t  # standard BM clock
    s = 0.0
    for k in range(terms):
        s += ((-1) ** k / (2 * k + 1)) * math.exp(-((2 * k + 1) ** 2) * math.pi**2 * tau / (8.0 * r**2))
    return 1.0 - 4.0 / math.pi * s


def dense_scan_sup_1d(fn, lo, hi, n=2_000_001):
    """Dense-grid supremum oracle for 1-d objectives."""
    z = np.linspace(lo, hi, n)[:, None]
    return float(np.max(fn(z)))
