"""Fundamental forms, shape operator, principal curvatures and convexity
predicates for parametrized surface patches in the model spaces.

The numeric pipeline here (ambient covariant derivatives of the jets,
eigenvalues of I^{-1} II symmetrized through the Cholesky factor of I) is the
oracle the closed-form verifiers are checked against; nothing in this module
uses the closed-form curvature expressions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convexa import backend as _backend
from convexa.geometry import ChartPoint, GeometryError, TangentVec
from convexa.spaces import (
    AmbientSpace,
    BergerSphere,
    E1_MAT,
    E2_MAT,
    Heisenberg,
    ProductSpace,
    RoundSphere,
    V_MAT,
    fmt,
)

DEGENERATE_TOL = 1e-9  # lower bound on |psi_u ^ psi_v|


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

class ParametricSurface:
    """A twice-differentiable immersion patch with a jet provider.

    Subclasses either override `jets` with analytic derivatives or inherit
    the Richardson-extrapolated finite-difference fallback (step 1e-4).
    """

    family = "custom"
    fd_step = 1e-4

    def __init__(self, domain=((0.0, 1.0), (0.0, 1.0))):
        self.domain = domain

    def map(self, U, V) -> np.ndarray:
        raise NotImplementedError

    def jets(self, U, V):
        return self._fd_jets(U, V)

    def normal_ref(self, space, U, V):
        """Reference direction fixing the normal sign; zeros = chart rule."""
        return None

    def grid(self, n_u: int, n_v: int, endpoint: bool = True):
        (u0, u1), (v0, v1) = self.domain
        u = np.linspace(u0, u1, n_u, endpoint=endpoint)
        v = np.linspace(v0, v1, n_v, endpoint=endpoint)
        U, V = np.meshgrid(u, v, indexing="ij")
        return U.ravel(), V.ravel()

    def _fd_jets(self, U, V):
        h = self.fd_step
        U = np.asarray(U, dtype=np.float64)
        V = np.asarray(V, dtype=np.float64)

        def at(du, dv):
            return self.map(U + du, V + dv)

        def d1v(du=0.0):
            return (8.0 * (at(du, h) - at(du, -h)) - (at(du, 2 * h) - at(du, -2 * h))) / (12.0 * h)

        P = at(0.0, 0.0)
        Pu = (8.0 * (at(h, 0) - at(-h, 0)) - (at(2 * h, 0) - at(-2 * h, 0))) / (12.0 * h)
        Pv = d1v()
        Puu = (-at(2 * h, 0) + 16 * at(h, 0) - 30 * P + 16 * at(-h, 0) - at(-2 * h, 0)) / (12 * h * h)
        Pvv = (-at(0, 2 * h) + 16 * at(0, h) - 30 * P + 16 * at(0, -h) - at(0, -2 * h)) / (12 * h * h)
        Puv = (8.0 * (d1v(h) - d1v(-h)) - (d1v(2 * h) - d1v(-2 * h))) / (12.0 * h)
        return P, Pu, Pv, Puu, Puv, Pvv


class BergerEquator(ParametricSurface):
    """The one-parameter family of great 2-spheres of the Berger 3-sphere:
    psi(x, y) = (cos x sin y, cos x cos y, sin x sin theta, sin x cos theta).
    """

    family = "equator"

    def __init__(self, theta: float = 0.0):
        super().__init__(domain=((0.0, 2 * np.pi), (0.0, 2 * np.pi)))
        self.theta = float(theta)

    def map(self, U, V):
        x, y = np.asarray(U, dtype=np.float64), np.asarray(V, dtype=np.float64)
        st, ct = np.sin(self.theta), np.cos(self.theta)
        return np.stack(
            [np.cos(x) * np.sin(y), np.cos(x) * np.cos(y),
             np.sin(x) * st, np.sin(x) * ct], axis=-1)

    def jets(self, U, V):
        x, y = np.asarray(U, dtype=np.float64), np.asarray(V, dtype=np.float64)
        st, ct = np.sin(self.theta), np.cos(self.theta)
        cx, sx, cy, sy = np.cos(x), np.sin(x), np.cos(y), np.sin(y)
        zero = np.zeros_like(x)
        P = np.stack([cx * sy, cx * cy, sx * st, sx * ct], axis=-1)
        Pu = np.stack([-sx * sy, -sx * cy, cx * st, cx * ct], axis=-1)
        Pv = np.stack([cx * cy, -cx * sy, zero, zero], axis=-1)
        Puu = -P
        Puv = np.stack([-sx * cy, sx * sy, zero, zero], axis=-1)
        Pvv = np.stack([-cx * sy, -cx * cy, zero, zero], axis=-1)
        return P, Pu, Pv, Puu, Puv, Pvv

    def normal_ref(self, space, U, V):
        if not isinstance(space, BergerSphere):
            raise GeometryError("equator surfaces live in a Berger sphere")
        x = np.asarray(U, dtype=np.float64)
        y = np.asarray(V, dtype=np.float64) + self.theta
        P = self.map(U, V)
        E1 = P @ E1_MAT.T
        E2 = P @ E2_MAT.T
        Vf = P @ V_MAT.T
        coef = space.kappa / (4.0 * space.tau**2)
        sy, cy = np.sin(y), np.cos(y)
        return -(
            (np.cos(x) * sy)[..., None] * E1
            + (np.cos(x) * cy)[..., None] * E2
            - (coef * np.sin(x))[..., None] * Vf
        )


class AffinePlane(ParametricSurface):
    """Affine plane a x + b y + c z = d, parametrized by a Euclidean frame."""

    family = "heis-plane"

    def __init__(self, a: float, b: float, c: float, d: float,
                 extent: float = 3.0):
        super().__init__(domain=((-extent, extent), (-extent, extent)))
        n = np.array([a, b, c], dtype=np.float64)
        nn = np.linalg.norm(n)
        if nn < 1e-12:
            raise GeometryError("degenerate plane: (a, b, c) must be nonzero")
        self.normal = n / nn
        self.offset = d / nn
        self.coeffs = (a, b, c, d)
        seed = np.array([1.0, 0.0, 0.0]) if abs(self.normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(self.normal, seed)
        e1 /= np.linalg.norm(e1)
        self.e1 = e1
        self.e2 = np.cross(self.normal, e1)
        self.p0 = self.offset * self.normal

    def map(self, U, V):
        U = np.asarray(U, dtype=np.float64)[..., None]
        V = np.asarray(V, dtype=np.float64)[..., None]
        return self.p0 + U * self.e1 + V * self.e2

    def jets(self, U, V):
        P = self.map(U, V)
        shape = P.shape
        Pu = np.broadcast_to(self.e1, shape).copy()
        Pv = np.broadcast_to(self.e2, shape).copy()
        zero = np.zeros(shape)
        return P, Pu, Pv, zero, zero.copy(), zero.copy()

    def normal_ref(self, space, U, V):
        P = self.map(U, V)
        ref = np.zeros_like(P)
        ref[..., 2] = 1.0  # prefer nu >= 0; vertical planes fall back
        return ref


class VerticalPlane(AffinePlane):
    """Preimage of the base line through the origin with direction angle
    `direction`; a vertical plane of the Heisenberg submersion."""

    family = "vertical-plane"

    def __init__(self, direction: float = 0.0, extent: float = 3.0):
        d = float(direction)
        super().__init__(-np.sin(d), np.cos(d), 0.0, 0.0, extent=extent)
        self.direction = d


class HeisGraph(ParametricSurface):
    """The Killing graph z = x^2 + y^2 over a centered square patch."""

    family = "heis-graph"

    def __init__(self, extent: float = 0.8):
        super().__init__(domain=((-extent, extent), (-extent, extent)))

    def map(self, U, V):
        U = np.asarray(U, dtype=np.float64)
        V = np.asarray(V, dtype=np.float64)
        return np.stack([U, V, U**2 + V**2], axis=-1)

    def jets(self, U, V):
        U = np.asarray(U, dtype=np.float64)
        V = np.asarray(V, dtype=np.float64)
        one = np.ones_like(U)
        zero = np.zeros_like(U)
        P = np.stack([U, V, U**2 + V**2], axis=-1)
        Pu = np.stack([one, zero, 2 * U], axis=-1)
        Pv = np.stack([zero, one, 2 * V], axis=-1)
        Puu = np.stack([zero, zero, 2 * one], axis=-1)
        Puv = np.stack([zero, zero, zero], axis=-1)
        Pvv = np.stack([zero, zero, 2 * one], axis=-1)
        return P, Pu, Pv, Puu, Puv, Pvv

    def normal_ref(self, space, U, V):
        P = self.map(U, V)
        ref = np.zeros_like(P)
        ref[..., 2] = 1.0
        return ref


class DistanceSphere(ParametricSurface):
    """Geodesic sphere of radius r about a point of base^2 x R (round base);
    the source surface of the mesh sphere fixtures. FD jets."""

    family = "distance-sphere"

    def __init__(self, base: RoundSphere, center=(np.pi / 2, 0.0, 0.0), radius: float = 0.3):
        super().__init__(domain=((0.05, np.pi - 0.05), (0.0, 2 * np.pi)))
        self.base = base
        self.center = np.asarray(center, dtype=np.float64)
        self.radius = float(radius)

    def map(self, U, V):
        al = np.asarray(U, dtype=np.float64)
        be = np.asarray(V, dtype=np.float64)
        th0, ph0 = self.center[0], self.center[1]
        c = np.array([np.sin(th0) * np.cos(ph0), np.sin(th0) * np.sin(ph0), np.cos(th0)])
        e_ph = np.array([-np.sin(ph0), np.cos(ph0), 0.0])
        e_th = np.array([np.cos(th0) * np.cos(ph0), np.cos(th0) * np.sin(ph0), -np.sin(th0)])
        ang = self.radius * np.sin(al) / self.base.radius
        u = np.cos(be)[..., None] * e_ph - np.sin(be)[..., None] * e_th
        x = np.cos(ang)[..., None] * c + np.sin(ang)[..., None] * u
        th = np.arccos(np.clip(x[..., 2], -1.0, 1.0))
        ph = np.arctan2(x[..., 1], x[..., 0])
        t = self.center[2] + self.radius * np.cos(al)
        return np.stack([th, ph, t], axis=-1)

    def normal_ref(self, space, U, V):
        P = self.map(U, V)
        return self.center - P  # inward: principal curvatures positive


class CustomSurface(ParametricSurface):
    def __init__(self, fn, domain, family: str = "custom"):
        super().__init__(domain=domain)
        self._fn = fn
        self.family = family

    def map(self, U, V):
        return self._fn(np.asarray(U, dtype=np.float64), np.asarray(V, dtype=np.float64))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FundamentalForms:
    E: float
    F: float
    G: float
    e: float
    f: float
    g: float

    def first_positive_definite(self) -> bool:
        return self.E > 0 and self.E * self.G - self.F**2 > 0


@dataclass(frozen=True)
class ShapeReport:
    k1: float
    k2: float
    H: float
    Ke: float
    nu: float
    sample: tuple
    forms: FundamentalForms
    normal: np.ndarray

    def __post_init__(self):
        if abs(self.Ke - self.k1 * self.k2) > 1e-9 * max(1.0, abs(self.Ke)):
            raise GeometryError("extrinsic curvature inconsistent with k1 k2")
        if abs(self.H - 0.5 * (self.k1 + self.k2)) > 1e-9 * max(1.0, abs(self.H)):
            raise GeometryError("mean curvature inconsistent with (k1+k2)/2")
        if not np.isnan(self.nu) and abs(self.nu) > 1.0 + 1e-10:
            raise GeometryError("angle function outside [-1, 1]")


@dataclass
class ShapeGrid:
    """Batched shape data over sample points; `ok` masks immersion-degenerate
    samples (|psi_u ^ psi_v| <= 1e-9), which carry NaNs."""
    U: np.ndarray
    V: np.ndarray
    P: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray
    Ke: np.ndarray
    nu: np.ndarray
    N: np.ndarray
    ok: np.ndarray

    def n_skipped(self) -> int:
        return int((~self.ok).sum())


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def shape_grid(surface: ParametricSurface, space: AmbientSpace, U, V,
               on_degenerate: str = "skip") -> ShapeGrid:
    """Evaluate the full shape pipeline over flat sample arrays U, V."""
    U = np.atleast_1d(np.asarray(U, dtype=np.float64)).ravel()
    V = np.atleast_1d(np.asarray(V, dtype=np.float64)).ravel()
    P, Pu, Pv, Puu, Puv, Pvv = [np.atleast_2d(a) for a in surface.jets(U, V)]
    ref = surface.normal_ref(space, U, V)
    if ref is None:
        ref = np.zeros_like(P)
    ref = np.atleast_2d(ref)

    kb = _backend.get_backend()
    g = kb.metric(space.code, space.params, P)
    E0 = np.einsum("nij,ni,nj->n", g, Pu, Pu)
    F0 = np.einsum("nij,ni,nj->n", g, Pu, Pv)
    G0 = np.einsum("nij,ni,nj->n", g, Pv, Pv)
    gram = E0 * G0 - F0**2
    ok = gram > DEGENERATE_TOL**2
    if not np.all(ok):
        if on_degenerate == "raise":
            bad = np.argmin(gram)
            raise GeometryError(
                f"degenerate immersion sample at (u, v) = ({U[bad]:.6g}, {V[bad]:.6g})")
    idx = np.where(ok)[0]
    out = {k: np.full(len(U), np.nan) for k in
           ("E", "F", "G", "e", "f", "g2", "k1", "k2", "H", "Ke", "nu")}
    N = np.full_like(P, np.nan)
    if len(idx):
        res = kb.shape_pipeline(space.code, space.params, P[idx], Pu[idx], Pv[idx],
                                Puu[idx], Puv[idx], Pvv[idx], ref[idx])
        for key, val in zip(("E", "F", "G", "e", "f", "g2", "k1", "k2", "H", "Ke", "nu"), res[:11]):
            out[key][idx] = val
        N[idx] = res[11]
    return ShapeGrid(U=U, V=V, P=P, N=N, ok=ok, **out)


def first_form(surface, space, uv) -> tuple[float, float, float]:
    sg = shape_grid(surface, space, [uv[0]], [uv[1]], on_degenerate="raise")
    return float(sg.E[0]), float(sg.F[0]), float(sg.G[0])


def unit_normal(surface, space, uv) -> TangentVec:
    sg = shape_grid(surface, space, [uv[0]], [uv[1]], on_degenerate="raise")
    p = ChartPoint(sg.P[0], space.space_id)
    return TangentVec(sg.N[0], p)


def shape_report(surface, space, uv) -> ShapeReport:
    sg = shape_grid(surface, space, [uv[0]], [uv[1]], on_degenerate="raise")
    forms = FundamentalForms(float(sg.E[0]), float(sg.F[0]), float(sg.G[0]),
                             float(sg.e[0]), float(sg.f[0]), float(sg.g2[0]))
    return ShapeReport(k1=float(sg.k1[0]), k2=float(sg.k2[0]), H=float(sg.H[0]),
                       Ke=float(sg.Ke[0]), nu=float(sg.nu[0]), sample=(float(uv[0]), float(uv[1])),
                       forms=forms, normal=sg.N[0])


def angle_function(surface, space, uv):
    """(nu, T): angle function and tangential part of the Killing field."""
    if not space.has_killing_field:
        raise GeometryError(f"{space.space_id} has no Killing field")
    sg = shape_grid(surface, space, [uv[0]], [uv[1]], on_degenerate="raise")
    x = sg.P[0]
    xi = space.killing_vec(x)
    nu = float(sg.nu[0])
    T = xi - nu * sg.N[0]
    p = ChartPoint(x, space.space_id)
    return nu, TangentVec(T, p)


# ---------------------------------------------------------------------------
# convexity predicates
# ---------------------------------------------------------------------------

CRITERIA = ("positive", "killing-bound", "berger-bound")

@dataclass
class ConvexityReport:
    criterion: str
    bound: float
    ok: np.ndarray
    slack: np.ndarray           # per-sample margin over the bound
    failing: np.ndarray         # (u, v) rows of failing samples
    n_degenerate: int

    @property
    def all_pass(self) -> bool:
        return bool(self.ok.all())

    @property
    def min_slack(self) -> float:
        return float(np.nanmin(self.slack))


def convexity_predicate(surface, space, criterion: str, grid,
                        tol: float = 1e-9) -> ConvexityReport:
    """Evaluate the pointwise convexity inequality over the grid.

    positive:       k_i > 0
    killing-bound:  k_i > |tau|        (Killing submersion models)
    berger-bound:   |k_i| >= |kappa - 4 tau^2| / (4 |tau|)
    """
    if criterion not in CRITERIA:
        raise GeometryError(f"unknown criterion {criterion!r}")
    U, V = grid
    if criterion == "berger-bound":
        if not isinstance(space, BergerSphere):
            raise GeometryError("berger-bound applies to Berger spheres only")
        bound = abs(space.kappa - 4 * space.tau**2) / (4 * abs(space.tau))
    elif criterion == "killing-bound":
        if isinstance(space, (BergerSphere, Heisenberg)):
            bound = abs(space.tau)
        elif isinstance(space, ProductSpace):
            bound = 0.0
        else:
            raise GeometryError("killing-bound needs a Killing submersion model")
    else:
        bound = 0.0
    sg = shape_grid(surface, space, U, V, on_degenerate="skip")
    if criterion == "berger-bound":
        slack = np.minimum(np.abs(sg.k1), np.abs(sg.k2)) - bound
    else:
        slack = np.minimum(sg.k1, sg.k2) - bound
    ok = np.where(sg.ok, slack > -tol, True)
    failing = np.stack([sg.U[~ok], sg.V[~ok]], axis=1) if np.any(~ok) else np.empty((0, 2))
    return ConvexityReport(criterion=criterion, bound=bound, ok=ok,
                           slack=np.where(sg.ok, slack, np.nan), failing=failing,
                           n_degenerate=sg.n_skipped())


# ---------------------------------------------------------------------------
# surface-spec grammar
# ---------------------------------------------------------------------------

def parse_surface(text: str) -> ParametricSurface:
    """equator theta=<f> | heis-plane a=<f> b=<f> c=<f> d=<f> |
    vertical-plane dir=<f> | heis-graph extent=<f> |
    distance-sphere r=<f> | custom mesh=<path>"""
    parts = text.strip().split()
    if not parts:
        raise GeometryError("empty surface spec")
    head = parts[0].lower()
    kv = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise GeometryError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        kv[k.lower()] = v
    try:
        if head == "equator":
            return BergerEquator(float(kv.get("theta", 0.0)))
        if head == "heis-plane":
            return AffinePlane(float(kv["a"]), float(kv["b"]), float(kv["c"]), float(kv["d"]),
                               extent=float(kv.get("extent", 3.0)))
        if head == "vertical-plane":
            return VerticalPlane(float(kv.get("dir", 0.0)), extent=float(kv.get("extent", 3.0)))
        if head == "heis-graph":
            return HeisGraph(float(kv.get("extent", 0.8)))
        if head == "distance-sphere":
            return DistanceSphere(RoundSphere(float(kv.get("base_r", 1.0))),
                                  radius=float(kv.get("r", 0.3)))
        if head == "custom":
            raise GeometryError(
                "custom mesh surfaces are classification inputs; load them with "
                "convexa.sweep.read_mesh and use the sweep classifier")
    except KeyError as exc:
        raise GeometryError(f"surface spec {text!r} is missing parameter {exc}") from exc
    raise GeometryError(f"unknown surface spec {text!r}")
