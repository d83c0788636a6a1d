"""Model-manifold catalogue with exact closed-form geometry.

Every variant supplies distance, exponential / logarithm maps, parallel
transport along the minimal geodesic, curvature-with-drift, and boundary
data (inward normal, second fundamental form).  The catalogue is fixed so
that all geometric primitives are exact; discretisation error then lives
entirely in the SDE stepping.

All operations are vectorised over leading axes: points are arrays of
shape ``(..., chart_dim)``.  Everything is immutable after construction
and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeometryError",
    "InjectivityRadiusExceeded",
    "CoincidentPoints",
    "NoBoundary",
    "NotOnBoundary",
    "Point",
    "TangentVec",
    "ModelSpace",
    "Euclidean",
    "OrnsteinUhlenbeck",
    "Sphere",
    "Hyperbolic",
    "HalfSpace",
    "EuclideanBall",
    "ExplosiveDrift1D",
    "model_from_config",
]

# Pairwise operations refuse to work beyond this fraction of the
# injectivity radius; experiments are configured to stay inside it.
INJ_MARGIN = 0.9


class GeometryError(ValueError):
    pass


class InjectivityRadiusExceeded(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class NoBoundary(GeometryError):
    pass


class NotOnBoundary(GeometryError):
    pass


@dataclass(frozen=True)
class Point:
    """Chart coordinates of a manifold point."""

    coords: np.ndarray


@dataclass(frozen=True)
class TangentVec:
    """Tangent vector given by chart components at a base point."""

    base: np.ndarray
    components: np.ndarray


def _arr(x) -> np.ndarray:
    """Accept Point / TangentVec / array-like and return an ndarray."""
    if isinstance(x, Point):
        return np.asarray(x.coords, dtype=float)
    if isinstance(x, TangentVec):
        return np.asarray(x.components, dtype=float)
    return np.asarray(x, dtype=float)


class ModelSpace:
    """Base class for the fixed catalogue of model manifolds.

    Subclasses define the chart, its geometry and the drift field Z of
    the generator  L = Laplace-Beltrami + Z.
    """

    variant = "abstract"
    dim: int
    chart_dim: int
    has_boundary = False
    is_compact = False
    conservative = True
    injectivity_radius = np.inf
    # True when pointwise_K is the same at every point (all catalogue
    # variants except the explosive one).
    constant_K = True

    # -- drift ---------------------------------------------------------

    def drift(self, x: np.ndarray) -> np.ndarray:
        """Z(x) in chart components; zero unless overridden."""
        return np.zeros_like(_arr(x))

    def sup_drift_norm_ball(self, center, radius: float) -> float:
        """Exact sup of |Z| over the metric ball B(center, radius)."""
        return 0.0

    # -- metric core (must be overridden) ------------------------------

    def distance(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def exp(self, x, v) -> np.ndarray:
        raise NotImplementedError

    def log(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def transport(self, x, y, v) -> np.ndarray:
        """Parallel transport of v from T_x M to T_y M along the minimal
        geodesic."""
        raise NotImplementedError

    def norm(self, x, v) -> np.ndarray:
        """Riemannian norm of tangent components v at x."""
        return np.linalg.norm(_arr(v), axis=-1)

    def inner(self, x, u, v) -> np.ndarray:
        return np.sum(_arr(u) * _arr(v), axis=-1)

    def grad_distance(self, x, y) -> np.ndarray:
        """Unit gradient of rho(x, .) evaluated at y (points away from x)."""
        x, y = _arr(x), _arr(y)
        rho = self.distance(x, y)
        if np.any(rho < 1e-14):
            raise CoincidentPoints("grad_distance needs x != y")
        return -self.log(y, x) / np.expand_dims(rho, -1)

    # -- frames and noise ----------------------------------------------

    def frame(self, x) -> np.ndarray:
        """Orthonormal tangent frame at x, shape (..., dim, chart_dim)."""
        raise NotImplementedError

    def tangent_from_frame(self, x, xi) -> np.ndarray:
        """Tangent components of sum_i xi_i e_i for the canonical frame."""
        fr = self.frame(x)
        return np.einsum("...ik,...i->...k", fr, _arr(xi))

    def frame_components(self, x, v) -> np.ndarray:
        """Coefficients <v, e_i> of tangent components v in the canonical
        orthonormal frame (inverse of tangent_from_frame)."""
        fr = self.frame(x)
        return np.einsum("...ik,...k->...i", fr, _arr(v))

    # -- curvature -----------------------------------------------------

    def ricci(self, x, u) -> np.ndarray:
        """Ric(u, u) for unit u (no drift term)."""
        raise NotImplementedError

    def ricci_z(self, x, u) -> np.ndarray:
        """Ric(u,u) - <u, grad_u Z> for a unit tangent vector u."""
        raise NotImplementedError

    def pointwise_K(self, x) -> np.ndarray:
        """Smallest admissible K(x):  max over unit u of -ricci_z(x, u)."""
        raise NotImplementedError

    def max_neg_ricci(self, x) -> np.ndarray:
        """max over unit u of -Ric(u, u)  (driftless, for the kappa
        constant)."""
        raise NotImplementedError

    def sup_pointwise_K_ball(self, center, radius: float) -> float:
        """Exact sup of pointwise_K over B(center, radius)."""
        if not self.constant_K:
            raise NotImplementedError
        return float(self.pointwise_K(_arr(center)))

    def radial_laplacian(self, center, z) -> np.ndarray:
        """Laplacian of rho(center, .) at z, the model-space comparison
        value (exact on the catalogue)."""
        raise NotImplementedError

    # -- boundary -------------------------------------------------------

    def boundary_data(self, x, u):
        """Inward unit normal N and second fundamental form II(u, u) at a
        boundary point x for u tangent to the boundary."""
        raise NoBoundary(f"{self.variant} has no boundary")

    def reflect(self, q):
        """Mirror a proposed chart position across the boundary.

        Returns (position, local_time_increment).  The increment is the
        Skorokhod regulator consistent with  dX = sqrt(2) dB + N dl:
        a mirrored overshoot of size s contributes 2 s.
        """
        return q, np.zeros(q.shape[:-1])

    def contains(self, x) -> np.ndarray:
        """Chart-domain membership."""
        return np.ones(_arr(x).shape[:-1], dtype=bool)

    # -- config ----------------------------------------------------------

    def to_config(self) -> dict:
        raise NotImplementedError

    def _require_inside_injectivity(self, rho):
        lim = INJ_MARGIN * self.injectivity_radius
        if np.any(np.asarray(rho) > lim):
            raise InjectivityRadiusExceeded(
                f"separation exceeds {INJ_MARGIN} x injectivity radius "
                f"({float(np.max(rho)):.4g} > {lim:.4g})"
            )

    def __repr__(self):
        cfg = self.to_config()
        args = ", ".join(f"{k}={v}" for k, v in cfg.items() if k != "variant")
        return f"{type(self).__name__}({args})"


# ----------------------------------------------------------------------
# Flat chart variants
# ----------------------------------------------------------------------


class _FlatChart(ModelSpace):
    """Shared implementation for variants whose chart metric is Euclidean
    (geodesics are straight lines in the chart)."""

    def distance(self, x, y):
        return np.linalg.norm(_arr(y) - _arr(x), axis=-1)

    def exp(self, x, v):
        x, v = _arr(x), _arr(v)
        self._require_inside_injectivity(np.linalg.norm(v, axis=-1))
        return x + v

    def log(self, x, y):
        return _arr(y) - _arr(x)

    def transport(self, x, y, v):
        return np.array(_arr(v), copy=True)

    def frame(self, x):
        x = _arr(x)
        eye = np.eye(self.chart_dim)
        return np.broadcast_to(eye, x.shape[:-1] + eye.shape)

    def tangent_from_frame(self, x, xi):
        return np.array(_arr(xi), copy=True)

    def ricci(self, x, u):
        return np.zeros(_arr(x).shape[:-1])

    def max_neg_ricci(self, x):
        return np.zeros(_arr(x).shape[:-1])

    def radial_laplacian(self, center, z):
        rho = self.distance(center, z)
        return (self.dim - 1) / rho


class Euclidean(_FlatChart):
    """R^d, optionally with a constant drift vector."""

    variant = "euclidean"

    def __init__(self, dim: int, drift_vec=None):
        self.dim = self.chart_dim = int(dim)
        self._drift = None
        if drift_vec is not None:
            self._drift = np.asarray(drift_vec, dtype=float)
            if self._drift.shape != (self.dim,):
                raise GeometryError("drift_vec must have length dim")

    def drift(self, x):
        x = _arr(x)
        if self._drift is None:
            return np.zeros_like(x)
        return np.broadcast_to(self._drift, x.shape).copy()

    def sup_drift_norm_ball(self, center, radius):
        return 0.0 if self._drift is None else float(np.linalg.norm(self._drift))

    def ricci_z(self, x, u):
        return np.zeros(_arr(x).shape[:-1])

    def pointwise_K(self, x):
        return np.zeros(_arr(x).shape[:-1])

    def to_config(self):
        cfg = {"variant": self.variant, "dim": self.dim}
        if self._drift is not None:
            cfg["drift_vec"] = list(self._drift)
        return cfg


class OrnsteinUhlenbeck(_FlatChart):
    """R^d with the linear restoring drift Z(x) = -lam * x."""

    variant = "ornstein_uhlenbeck"

    def __init__(self, dim: int, lam: float):
        if lam <= 0:
            raise GeometryError("lam must be > 0")
        self.dim = self.chart_dim = int(dim)
        self.lam = float(lam)

    def drift(self, x):
        return -self.lam * _arr(x)

    def sup_drift_norm_ball(self, center, radius):
        return self.lam * (float(np.linalg.norm(_arr(center))) + radius)

    def ricci_z(self, x, u):
        # grad Z = -lam * Id, so -<u, grad_u Z> = lam for |u| = 1.
        return np.full(_arr(x).shape[:-1], self.lam)

    def pointwise_K(self, x):
        return np.full(_arr(x).shape[:-1], -self.lam)

    # Invariant probability measure: product Gaussian N(0, 1/lam).

    def stationary_std(self):
        return 1.0 / np.sqrt(self.lam)

    def to_config(self):
        return {"variant": self.variant, "dim": self.dim, "lam": self.lam}


class ExplosiveDrift1D(_FlatChart):
    """The real line with the superlinear drift Z(x) = x^3.

    The diffusion explodes in finite time with positive probability, so
    the variant is the only non-conservative member of the catalogue.
    """

    variant = "explosive_drift_1d"
    conservative = False
    constant_K = False
    explosion_threshold = 1e6

    def __init__(self):
        self.dim = self.chart_dim = 1

    def drift(self, x):
        x = _arr(x)
        return x**3

    def sup_drift_norm_ball(self, center, radius):
        return (abs(float(_arr(center)[..., 0])) + radius) ** 3

    def ricci_z(self, x, u):
        # d/dx (x^3) = 3 x^2 pointing along u = +-1, so Ric_Z = -3 x^2.
        x = _arr(x)
        return -3.0 * x[..., 0] ** 2

    def pointwise_K(self, x):
        x = _arr(x)
        return 3.0 * x[..., 0] ** 2

    def sup_pointwise_K_ball(self, center, radius):
        c = float(_arr(center)[..., 0])
        return 3.0 * (abs(c) + radius) ** 2

    def to_config(self):
        return {"variant": self.variant}


class HalfSpace(_FlatChart):
    """R^d restricted to x_1 >= 0 with reflection at the flat boundary."""

    variant = "half_space"
    has_boundary = True

    def __init__(self, dim: int):
        self.dim = self.chart_dim = int(dim)

    def ricci_z(self, x, u):
        return np.zeros(_arr(x).shape[:-1])

    def pointwise_K(self, x):
        return np.zeros(_arr(x).shape[:-1])

    def contains(self, x):
        return _arr(x)[..., 0] >= 0

    def boundary_data(self, x, u):
        x, u = _arr(x), _arr(u)
        if np.any(np.abs(x[..., 0]) > 1e-10):
            raise NotOnBoundary("x must satisfy x_1 = 0")
        if np.any(np.abs(u[..., 0]) > 1e-10 * (1 + np.abs(u).max())):
            raise GeometryError("u must be tangent to the boundary")
        normal = np.zeros_like(x)
        normal[..., 0] = 1.0
        return normal, np.zeros(x.shape[:-1])

    def reflect(self, q):
        q = np.array(q, copy=True)
        over = np.maximum(-q[..., 0], 0.0)
        q[..., 0] = np.abs(q[..., 0])
        return q, 2.0 * over

    def to_config(self):
        return {"variant": self.variant, "dim": self.dim}


class EuclideanBall(_FlatChart):
    """Closed ball of radius R in R^d with reflection at the sphere."""

    variant = "euclidean_ball"
    has_boundary = True
    is_compact = True

    def __init__(self, dim: int, radius: float):
        if radius <= 0:
            raise GeometryError("radius must be > 0")
        self.dim = self.chart_dim = int(dim)
        self.radius = float(radius)

    def ricci_z(self, x, u):
        return np.zeros(_arr(x).shape[:-1])

    def pointwise_K(self, x):
        return np.zeros(_arr(x).shape[:-1])

    def contains(self, x):
        return np.linalg.norm(_arr(x), axis=-1) <= self.radius + 1e-12

    def boundary_data(self, x, u):
        x, u = _arr(x), _arr(u)
        r = np.linalg.norm(x, axis=-1)
        if np.any(np.abs(r - self.radius) > 1e-10):
            raise NotOnBoundary("x must lie on the sphere |x| = R")
        normal = -x / self.radius
        if np.any(np.abs(np.sum(u * normal, axis=-1)) > 1e-10 * (1 + np.abs(u).max())):
            raise GeometryError("u must be tangent to the boundary")
        # Principal curvatures of the sphere w.r.t. the inward normal
        # are all 1/R, hence II(u, u) = |u|^2 / R  (convex boundary).
        ii = np.sum(u * u, axis=-1) / self.radius
        return normal, ii

    def reflect(self, q):
        q = np.array(q, copy=True)
        r = np.linalg.norm(q, axis=-1)
        over = np.maximum(r - self.radius, 0.0)
        out = over > 0
        if np.any(out):
            scale = np.where(out, np.maximum(2 * self.radius - r, 0.0) / np.maximum(r, 1e-300), 1.0)
            q *= scale[..., None]
        return q, 2.0 * over

    def to_config(self):
        return {"variant": self.variant, "dim": self.dim, "radius": self.radius}


# ----------------------------------------------------------------------
# Sphere (embedded chart) and hyperbolic plane (upper half-plane chart)
# ----------------------------------------------------------------------


class Sphere(ModelSpace):
    """Round sphere of dimension 1 or 2, embedded in R^{d+1} with
    |coords| = radius."""

    variant = "sphere"
    is_compact = True

    def __init__(self, dim: int, radius: float = 1.0):
        if dim not in (1, 2):
            raise GeometryError("sphere catalogue covers d in {1, 2}")
        if radius <= 0:
            raise GeometryError("radius must be > 0")
        self.dim = int(dim)
        self.chart_dim = self.dim + 1
        self.radius = float(radius)
        self.injectivity_radius = np.pi * self.radius

    def contains(self, x):
        r = np.linalg.norm(_arr(x), axis=-1)
        return np.abs(r - self.radius) <= 1e-9 * self.radius

    def _angle(self, x, y):
        # 2 arcsin of half the chord length: stable near coincidence.
        chord = np.linalg.norm(_arr(y) - _arr(x), axis=-1) / self.radius
        return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))

    def distance(self, x, y):
        return self.radius * self._angle(x, y)

    def exp(self, x, v):
        x, v = _arr(x), _arr(v)
        s = np.linalg.norm(v, axis=-1)
        self._require_inside_injectivity(s)
        theta = s / self.radius
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = np.where(s[..., None] > 0, v / np.maximum(s, 1e-300)[..., None], 0.0)
        out = np.cos(theta)[..., None] * x + (self.radius * np.sin(theta))[..., None] * direction
        # renormalise to kill accumulated rounding
        out *= self.radius / np.linalg.norm(out, axis=-1, keepdims=True)
        return out

    def log(self, x, y):
        x, y = _arr(x), _arr(y)
        alpha = self._angle(x, y)
        self._require_inside_injectivity(self.radius * alpha)
        c = np.cos(alpha)
        u = y - c[..., None] * x
        nu = np.linalg.norm(u, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = np.where(nu[..., None] > 1e-300, u / np.maximum(nu, 1e-300)[..., None], 0.0)
        return (self.radius * alpha)[..., None] * direction

    def transport(self, x, y, v):
        x, y, v = _arr(x), _arr(y), _arr(v)
        alpha = self._angle(x, y)
        self._require_inside_injectivity(self.radius * alpha)
        lg = self.log(x, y)
        s = np.linalg.norm(lg, axis=-1)
        small = s < 1e-14
        with np.errstate(invalid="ignore", divide="ignore"):
            e = np.where(small[..., None], 0.0, lg / np.maximum(s, 1e-300)[..., None])
        u1 = x / self.radius
        a = np.sum(v * e, axis=-1)
        w = v - a[..., None] * e
        e_t = -np.sin(alpha)[..., None] * u1 + np.cos(alpha)[..., None] * e
        out = a[..., None] * e_t + w
        return np.where(small[..., None], v, out)

    def frame(self, x):
        x = _arr(x)
        if self.dim == 1:
            e = np.stack([-x[..., 1], x[..., 0]], axis=-1) / self.radius
            return e[..., None, :]
        # dim == 2: pick the coordinate axis least aligned with x.
        n = x / self.radius
        ref = np.zeros_like(n)
        idx = np.argmin(np.abs(n), axis=-1)
        np.put_along_axis(ref, idx[..., None], 1.0, axis=-1)
        e1 = np.cross(ref, n)
        e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
        e2 = np.cross(n, e1)
        return np.stack([e1, e2], axis=-2)

    def ricci(self, x, u):
        val = (self.dim - 1) / self.radius**2
        return np.full(_arr(x).shape[:-1], val)

    def ricci_z(self, x, u):
        return self.ricci(x, u)

    def pointwise_K(self, x):
        return np.full(_arr(x).shape[:-1], -(self.dim - 1) / self.radius**2)

    def max_neg_ricci(self, x):
        return np.full(_arr(x).shape[:-1], -(self.dim - 1) / self.radius**2)

    def radial_laplacian(self, center, z):
        rho = self.distance(center, z)
        if self.dim == 1:
            return np.zeros_like(rho)
        return (self.dim - 1) / self.radius / np.tan(rho / self.radius)

    def to_config(self):
        return {"variant": self.variant, "dim": self.dim, "radius": self.radius}


class Hyperbolic(ModelSpace):
    """Hyperbolic plane (curvature -1) in the upper half-plane chart.

    Points are (x1, x2) with x2 > 0 and metric (dx1^2 + dx2^2) / x2^2.
    Internally the chart is handled as complex numbers; geodesic maps go
    through the Cayley transform to the disk, where geodesics from the
    origin are straight diameters.
    """

    variant = "hyperbolic"

    def __init__(self, dim: int = 2):
        if dim != 2:
            raise GeometryError("hyperbolic catalogue covers d = 2 only")
        self.dim = self.chart_dim = 2

    @staticmethod
    def _c(x):
        x = _arr(x)
        return x[..., 0] + 1j * x[..., 1]

    @staticmethod
    def _r(z):
        return np.stack([z.real, z.imag], axis=-1)

    def contains(self, x):
        return _arr(x)[..., 1] > 0

    def distance(self, x, y):
        zx, zy = self._c(x), self._c(y)
        u = np.abs(zy - zx) ** 2 / (2.0 * zx.imag * zy.imag)
        # arccosh(1 + u) in a form stable near coincidence
        return np.log1p(u + np.sqrt(u * (2.0 + u)))

    def log(self, x, y):
        zx, zy = self._c(x), self._c(y)
        w = (zy - zx.real) / zx.imag          # move x to i
        zeta = (w - 1j) / (w + 1j)            # Cayley: i -> 0
        az = np.abs(zeta)
        rho = 2.0 * np.arctanh(np.clip(az, 0.0, 1.0 - 1e-16))
        with np.errstate(invalid="ignore", divide="ignore"):
            d = np.where(az > 0, zeta / np.maximum(az, 1e-300), 0.0)
        v = rho * (1j * d) * zx.imag          # tangent back at x
        return self._r(v)

    def exp(self, x, v):
        zx = self._c(x)
        vz = self._c(np.asarray(v, dtype=float)) / zx.imag
        s = np.abs(vz)
        d = np.where(s > 0, vz / np.maximum(s, 1e-300) / 1j, 0.0)
        zeta = np.tanh(s / 2.0) * d
        w = 1j * (1.0 + zeta) / (1.0 - zeta)
        out = w * zx.imag + zx.real
        return self._r(out)

    def transport(self, x, y, v):
        x, y, v = _arr(x), _arr(y), _arr(v)
        rho = self.distance(x, y)
        small = rho < 1e-14
        rho_safe = np.maximum(rho, 1e-300)
        t0 = self._c(self.log(x, y)) / rho_safe
        t1 = -self._c(self.log(y, x)) / rho_safe
        vz = self._c(v)
        im_x2 = _arr(x)[..., 1] ** 2
        # components in the orthonormal frame (T0, i T0) at x; the chart
        # is conformal so multiplication by i is the metric rotation.
        a = (vz * np.conj(t0)).real / im_x2
        b = (vz * np.conj(1j * t0)).real / im_x2
        out = a * t1 + b * (1j * t1)
        out = np.where(small, vz, out)
        return self._r(out)

    def frame(self, x):
        x = _arr(x)
        sc = x[..., 1]
        eye = np.eye(2)
        return sc[..., None, None] * np.broadcast_to(eye, x.shape[:-1] + eye.shape)

    def tangent_from_frame(self, x, xi):
        return _arr(x)[..., 1:2] * _arr(xi)

    def frame_components(self, x, v):
        return _arr(v) / _arr(x)[..., 1:2]

    def norm(self, x, v):
        return np.linalg.norm(_arr(v), axis=-1) / _arr(x)[..., 1]

    def inner(self, x, u, v):
        return np.sum(_arr(u) * _arr(v), axis=-1) / _arr(x)[..., 1] ** 2

    def ricci(self, x, u):
        return np.full(_arr(x).shape[:-1], -1.0)

    def ricci_z(self, x, u):
        return self.ricci(x, u)

    def pointwise_K(self, x):
        return np.ones(_arr(x).shape[:-1])

    def max_neg_ricci(self, x):
        return np.ones(_arr(x).shape[:-1])

    def radial_laplacian(self, center, z):
        rho = self.distance(center, z)
        return 1.0 / np.tanh(rho)

    def to_config(self):
        return {"variant": self.variant, "dim": self.dim}


# ----------------------------------------------------------------------
# Factory
# ----------------------------------------------------------------------

_VARIANTS = {
    "euclidean": Euclidean,
    "ornstein_uhlenbeck": OrnsteinUhlenbeck,
    "sphere": Sphere,
    "hyperbolic": Hyperbolic,
    "half_space": HalfSpace,
    "euclidean_ball": EuclideanBall,
    "explosive_drift_1d": ExplosiveDrift1D,
}


def model_from_config(cfg: dict) -> ModelSpace:
    """Build a catalogue variant from a configuration record."""
    cfg = dict(cfg)
    try:
        name = cfg.pop("variant")
    except KeyError:
        raise GeometryError("model config needs a 'variant' field") from None
    try:
        cls = _VARIANTS[name]
    except KeyError:
        raise GeometryError(
            f"unknown variant {name!r}; known: {sorted(_VARIANTS)}"
        ) from None
    return cls(**cfg)
