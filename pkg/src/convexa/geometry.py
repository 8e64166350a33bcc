"""Chart-based Riemannian primitives.

Everything here is a pure function of a space object (see convexa.spaces)
exposing a low-level descriptor ``(code, params)`` consumed by the selected
kernel backend, plus chart metadata. Points and tangent vectors are small
validated wrappers; batch work bypasses them and feeds raw arrays to the
backend directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from convexa import backend as _backend
from convexa._core import spec as _spec


class GeometryError(ValueError):
    """Raised on chart/dimension/invariant violations."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChartPoint:
    coords: np.ndarray
    space_id: str

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=np.float64))


@dataclass(frozen=True)
class TangentVec:
    components: np.ndarray
    base: ChartPoint

    def __post_init__(self):
        object.__setattr__(self, "components", np.asarray(self.components, dtype=np.float64))


@dataclass(frozen=True)
class MetricAtPoint:
    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.float64)
        if np.max(np.abs(g - g.T)) >= 1e-14:
            raise GeometryError("metric matrix not symmetric")
        if np.linalg.eigvalsh(g)[0] <= 0:
            raise GeometryError("metric matrix not positive definite")
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class ChristoffelAtPoint:
    gamma: np.ndarray  # [k, i, j] = Gamma^k_ij
    mode: str  # "analytic" | "finite-difference"


@dataclass
class Curve:
    points: np.ndarray      # [n+1, d]
    velocities: np.ndarray  # [n+1, d]
    speeds: np.ndarray      # metric speed at each node

    def endpoint(self) -> np.ndarray:
        return self.points[-1]


# vector-field jets for covariant differentiation ---------------------------

@dataclass(frozen=True)
class ConstantField:
    vec: np.ndarray

    def value(self, x):
        return np.asarray(self.vec, dtype=np.float64)

    def jacobian(self, x):
        return np.zeros((len(self.vec), len(self.vec)))


@dataclass(frozen=True)
class LinearField:
    """Y(x) = A x; covers the Berger frame fields."""
    A: np.ndarray

    def value(self, x):
        return np.asarray(self.A) @ x

    def jacobian(self, x):
        return np.asarray(self.A, dtype=np.float64)


@dataclass(frozen=True)
class CallableField:
    fn: object
    h: float = 1e-6

    def value(self, x):
        return np.asarray(self.fn(x), dtype=np.float64)

    def jacobian(self, x):
        d = len(x)
        jac = np.empty((d, d))
        for i in range(d):
            e = np.zeros(d)
            e[i] = self.h
            jac[:, i] = (self.value(x + e) - self.value(x - e)) / (2 * self.h)
        return jac


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------

def check_point(space, p: ChartPoint | np.ndarray) -> np.ndarray:
    x = p.coords if isinstance(p, ChartPoint) else np.asarray(p, dtype=np.float64)
    if x.shape != (space.dim,):
        raise GeometryError(f"point has dimension {x.shape}, chart needs {space.dim}")
    space.validate_point(x)
    return x


def check_vec(space, p: np.ndarray, v: TangentVec | np.ndarray) -> np.ndarray:
    x = v.components if isinstance(v, TangentVec) else np.asarray(v, dtype=np.float64)
    if x.shape != (space.dim,):
        raise GeometryError(f"vector has dimension {x.shape}, chart needs {space.dim}")
    space.validate_tangent(p, x)
    return x


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def metric_matrix(space, p) -> MetricAtPoint:
    x = check_point(space, p)
    kb = _backend.get_backend()
    return MetricAtPoint(kb.metric(space.code, space.params, x[None, :])[0])


def metric_apply(space, p, X, Y) -> float:
    x = check_point(space, p)
    if isinstance(X, TangentVec) and isinstance(Y, TangentVec):
        if not np.array_equal(X.base.coords, Y.base.coords):
            raise GeometryError("vectors based at different points")
    vx = check_vec(space, x, X)
    vy = check_vec(space, x, Y)
    g = metric_matrix(space, p).g
    return float(vx @ g @ vy)


def christoffel(space, p, mode: str | None = None, h: float = 1e-5) -> ChristoffelAtPoint:
    """Levi-Civita symbols at p; analytic when the space supplies closed-form
    metric derivatives, otherwise central differences with step h."""
    x = check_point(space, p)
    kb = _backend.get_backend()
    if mode is None:
        mode = "analytic" if space.has_analytic_metric else "finite-difference"
    if mode == "analytic":
        gam = kb.christoffel(space.code, space.params, x[None, :])[0]
    else:
        gam = kb.christoffel_fd(space.code, space.params, x[None, :], h)[0]
    return ChristoffelAtPoint(gam, mode)


def covariant_derivative(space, p, X, yfield, mode: str | None = None) -> TangentVec:
    """(nabla_X Y)^k = X(Y^k) + Gamma^k_ij X^i Y^j."""
    x = check_point(space, p)
    vx = check_vec(space, x, X)
    if not (hasattr(yfield, "value") and hasattr(yfield, "jacobian")):
        raise GeometryError("yfield must provide value/jacobian jet data")
    gam = christoffel(space, p, mode=mode).gamma
    y = yfield.value(x)
    out = yfield.jacobian(x) @ vx + np.einsum("kij,i,j->k", gam, vx, y)
    base = p if isinstance(p, ChartPoint) else ChartPoint(x, space.space_id)
    return TangentVec(out, base)


def riemann_tensor(space, p, h2: float = 1e-4) -> np.ndarray:
    """R^l_{kij} (curvature of the Levi-Civita connection) from differentiated
    Christoffel symbols; the Gamma-derivative uses central differences."""
    x = check_point(space, p)
    kb = _backend.get_backend()
    d = space.dim
    use_analytic = space.has_analytic_metric
    def gam_at(pts):
        if use_analytic:
            return kb.christoffel(space.code, space.params, pts)
        return kb.christoffel_fd(space.code, space.params, pts)

    plus = np.repeat(x[None, :], d, axis=0) + np.eye(d) * h2
    minus = np.repeat(x[None, :], d, axis=0) - np.eye(d) * h2
    dgam = (gam_at(plus) - gam_at(minus)) / (2 * h2)  # [m, l, i, j] = d_m Gamma^l_ij
    gam = gam_at(x[None, :])[0]
    R = (
        np.einsum("iljk->lkij", dgam)
        - np.einsum("jlik->lkij", dgam)
        + np.einsum("lim,mjk->lkij", gam, gam)
        - np.einsum("ljm,mik->lkij", gam, gam)
    )
    return R


def sectional_curvature(space, p, X, Y, h2: float = 1e-4) -> float:
    """K of the plane span{X, Y}: <R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2)."""
    x = check_point(space, p)
    vx = check_vec(space, x, X)
    vy = check_vec(space, x, Y)
    g = metric_matrix(space, p).g
    gram = (vx @ g @ vx) * (vy @ g @ vy) - (vx @ g @ vy) ** 2
    if gram < 1e-10:
        raise GeometryError("degenerate plane: |X ^ Y| below threshold")
    R = riemann_tensor(space, p, h2=h2)
    rxyy = np.einsum("lkij,k,i,j->l", R, vy, vx, vy)
    return float((rxyy @ g @ vx) / gram)


def geodesic_integrate(space, p, v, length: float, step: float) -> Curve:
    """RK4 geodesic from p with initial velocity v, run for the given arc
    length. Fails if the metric speed drifts by more than 1e-3 relative."""
    x = check_point(space, p)
    vv = check_vec(space, x, v)
    g0 = metric_matrix(space, p).g
    speed0 = float(np.sqrt(vv @ g0 @ vv))
    if speed0 <= 0:
        raise GeometryError("zero initial velocity")
    if step <= 0:
        raise GeometryError("step must be positive")
    n_steps = max(1, int(np.ceil(length / (speed0 * step))))
    h = length / (speed0 * n_steps)
    kb = _backend.get_backend()
    xs, vs = kb.rk4_geodesic(space.code, space.params, x, vv, h, n_steps)
    gs = kb.metric(space.code, space.params, xs)
    speeds = np.sqrt(np.einsum("nij,ni,nj->n", gs, vs, vs))
    drift = np.max(np.abs(speeds - speed0)) / speed0
    if drift > 1e-3:
        raise GeometryError(f"geodesic speed drift {drift:.2e}; step too large")
    return Curve(xs, vs, speeds)


def wedge(space, p, X, Y) -> np.ndarray:
    """Metric cross product X ^ Y at p (3-manifolds only)."""
    x = check_point(space, p)
    vx = check_vec(space, x, X)
    vy = check_vec(space, x, Y)
    kb = _backend.get_backend()
    return kb.wedge(space.code, space.params, x[None, :], vx[None, :], vy[None, :])[0]
