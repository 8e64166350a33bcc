"""Concrete ambient spaces: Berger spheres, Heisenberg space, products over
2D base surfaces, plus the Killing-field utilities shared by the verifiers.

Conventions fixed here (each one cross-checked numerically in the tests):

* Berger metric on the unit 3-sphere in C^2 ~ R^4:
      <X,Y> = (4/kappa) ( X.Y + (4 tau^2/kappa - 1)(X.Jp)(Y.Jp) )
  with J the complex structure. The frame E1 = (-w̄, z̄), E2 = (-i w̄, i z̄),
  V = (iz, iw) is orthogonal with |E_i|^2 = 4/kappa and |V|^2 = 16 tau^2/kappa^2,
  and the unit vertical Killing field is xi = (kappa / 4|tau|) V.
* The Levi-Civita frame table (derived by Koszul from the bracket relations
  [E1,E2] = -2V, [E2,V] = -2E1, [V,E1] = -2E2, and confirmed against
  finite-difference Christoffel symbols):
      nab_E1 E1 = 0          nab_E1 E2 = -V         nab_E1 V = a E2
      nab_E2 E1 = V          nab_E2 E2 = 0          nab_E2 V = -a E1
      nab_V  E1 = (a-2) E2   nab_V  E2 = -(a-2) E1  nab_V  V = 0
  with a = 4 tau^2 / kappa.
* Heisenberg metric dx^2 + dy^2 + (tau(y dx - x dy) + dz)^2 with unit Killing
  field dz; orientation dx^dy^dz makes nab_X xi = tau X ^ xi hold with the
  declared tau.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convexa import backend as _backend
from convexa import geometry as geo
from convexa._core import spec as _spec
from convexa._core.numpy_backend import J4, profile_gauss, profile_pole
from convexa.geometry import ChartPoint, GeometryError, TangentVec

# Berger frame fields as linear maps on R^4 (field(p) = A p)
E1_MAT = np.array([[0.0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
E2_MAT = np.array([[0.0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])
V_MAT = J4


class AmbientSpace:
    """Base class: a chart, a metric descriptor and optional Killing data."""

    code: int
    params: np.ndarray
    dim: int
    space_id: str
    has_analytic_metric = True
    has_killing_field = False

    def validate_point(self, x: np.ndarray) -> None:
        pass

    def validate_tangent(self, x: np.ndarray, v: np.ndarray) -> None:
        pass

    def project(self, x: np.ndarray) -> np.ndarray:
        return x

    def point(self, coords) -> ChartPoint:
        x = self.project(np.asarray(coords, dtype=np.float64))
        p = ChartPoint(x, self.space_id)
        geo.check_point(self, p)
        return p

    def tangent(self, p: ChartPoint, v) -> TangentVec:
        t = TangentVec(np.asarray(v, dtype=np.float64), p)
        geo.check_vec(self, p.coords, t)
        return t

    def random_point(self, rng: np.random.Generator) -> ChartPoint:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.space_id!r}>"


class EuclideanSpace(AmbientSpace):
    def __init__(self, dim: int = 3):
        self.dim = dim
        self.code, self.params = _spec.pack(_spec.EUCLIDEAN, float(dim))
        self.space_id = f"euclidean dim={dim}"
        self.has_killing_field = dim == 3

    def killing_vec(self, x):
        xi = np.zeros(self.dim)
        xi[-1] = 1.0
        return xi

    def random_point(self, rng):
        return self.point(rng.uniform(-2, 2, self.dim))


class BergerSphere(AmbientSpace):
    dim = 4

    def __init__(self, kappa: float, tau: float):
        if kappa <= 0:
            raise GeometryError("Berger sphere needs kappa > 0")
        if tau == 0:
            raise GeometryError("Berger sphere needs tau != 0")
        self.kappa = float(kappa)
        self.tau = float(tau)
        self.code, self.params = _spec.pack(_spec.BERGER, kappa, tau)
        self.space_id = f"berger kappa={fmt(kappa)} tau={fmt(tau)}"
        self.has_killing_field = True

    def validate_point(self, x):
        if abs(x @ x - 1.0) > 1e-12:
            raise GeometryError("point off the unit-sphere constraint |z|^2+|w|^2=1")

    def validate_tangent(self, x, v):
        if abs(v @ x) > 1e-10:
            raise GeometryError("vector not tangent to the sphere")

    def project(self, x):
        n = np.linalg.norm(x)
        if n == 0:
            raise GeometryError("cannot project the origin onto the sphere")
        return x / n

    def frame(self, p: ChartPoint):
        """The global orthogonal frame (E1, E2, V) at p."""
        x = geo.check_point(self, p)
        return tuple(TangentVec(A @ x, p) for A in (E1_MAT, E2_MAT, V_MAT))

    def killing_vec(self, x):
        return (self.kappa / (4.0 * abs(self.tau))) * (J4 @ x)

    def killing_jet(self):
        return geo.LinearField((self.kappa / (4.0 * abs(self.tau))) * J4)

    def random_point(self, rng):
        return self.point(rng.standard_normal(4))


FRAME_NAMES = ("E1", "E2", "V")


def berger_connection(space: BergerSphere, i, j) -> np.ndarray:
    """Coefficients of nab_{F_i} F_j in the (E1, E2, V) frame.

    This is the Levi-Civita table of the Berger metric (see the module
    docstring for the a-2 coefficient in the V rows).
    """
    a = 4.0 * space.tau**2 / space.kappa
    table = {
        ("E1", "E1"): (0.0, 0.0, 0.0),
        ("E1", "E2"): (0.0, 0.0, -1.0),
        ("E1", "V"): (0.0, a, 0.0),
        ("E2", "E1"): (0.0, 0.0, 1.0),
        ("E2", "E2"): (0.0, 0.0, 0.0),
        ("E2", "V"): (-a, 0.0, 0.0),
        ("V", "E1"): (0.0, a - 2.0, 0.0),
        ("V", "E2"): (-(a - 2.0), 0.0, 0.0),
        ("V", "V"): (0.0, 0.0, 0.0),
    }
    key = (_frame_name(i), _frame_name(j))
    return np.array(table[key])


def _frame_name(i) -> str:
    if isinstance(i, str):
        name = i.upper()
        if name not in FRAME_NAMES:
            raise GeometryError(f"unknown frame index {i!r}")
        return name
    return FRAME_NAMES[int(i)]


class Heisenberg(AmbientSpace):
    dim = 3

    def __init__(self, tau: float):
        if tau == 0:
            raise GeometryError("Heisenberg space needs tau != 0")
        self.tau = float(tau)
        self.code, self.params = _spec.pack(_spec.HEISENBERG, tau)
        self.space_id = f"heisenberg tau={fmt(tau)}"
        self.has_killing_field = True

    def killing_vec(self, x):
        return np.array([0.0, 0.0, 1.0])

    def killing_jet(self):
        return geo.ConstantField(np.array([0.0, 0.0, 1.0]))

    def horizontal_frame(self, x):
        """g-orthonormal horizontal fields (dx - tau y dz, dy + tau x dz)."""
        t = self.tau
        return np.array([1.0, 0.0, -t * x[1]]), np.array([0.0, 1.0, t * x[0]])

    def random_point(self, rng):
        return self.point(rng.uniform(-2, 2, 3))


# ---------------------------------------------------------------------------
# 2D base surfaces and products
# ---------------------------------------------------------------------------

class Surface2D(AmbientSpace):
    """A 2D Riemannian chart usable both standalone and as a product base."""

    dim = 2
    kind: str
    periodic_phi = False

    def gauss_curvature(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_grid(self, n: int) -> np.ndarray:
        raise NotImplementedError


class RoundSphere(Surface2D):
    kind = "round-sphere"
    periodic_phi = True

    def __init__(self, radius: float = 1.0):
        if radius <= 0:
            raise GeometryError("sphere radius must be positive")
        self.radius = float(radius)
        self.code, self.params = _spec.pack(_spec.SURF_SPHERE, radius)
        self.space_id = f"sphere r={fmt(radius)}"

    def validate_point(self, x):
        if not (1e-6 < x[0] < np.pi - 1e-6):
            raise GeometryError("polar chart degenerate at theta near 0 or pi")

    def gauss_curvature(self, pts):
        pts = np.atleast_2d(pts)
        return np.full(len(pts), 1.0 / self.radius**2)

    def sample_grid(self, n):
        th = np.linspace(0.3, np.pi - 0.3, n)
        ph = np.linspace(-np.pi, np.pi, n)
        T, P = np.meshgrid(th, ph, indexing="ij")
        return np.stack([T.ravel(), P.ravel()], axis=1)

    def point_at(self, center, dist: float, bearing: float) -> np.ndarray:
        """Chart coordinates of the point at geodesic distance `dist` from
        `center` in direction `bearing` (0 = increasing phi ... pi/2 = north)."""
        th0, ph0 = center
        c = np.array([np.sin(th0) * np.cos(ph0), np.sin(th0) * np.sin(ph0), np.cos(th0)])
        e_ph = np.array([-np.sin(ph0), np.cos(ph0), 0.0])
        e_th = np.array([np.cos(th0) * np.cos(ph0), np.cos(th0) * np.sin(ph0), -np.sin(th0)])
        u = np.cos(bearing) * e_ph - np.sin(bearing) * e_th  # -e_th points north
        ang = dist / self.radius
        x = np.cos(ang) * c + np.sin(ang) * u
        return np.array([np.arccos(np.clip(x[2], -1.0, 1.0)), np.arctan2(x[1], x[0])])

    def random_point(self, rng):
        return self.point([rng.uniform(0.4, np.pi - 0.4), rng.uniform(-np.pi, np.pi)])


class CappedCylinder(Surface2D):
    """Right cylinder of height l closed by unit-curvature caps, all blended
    C^2 and kept strictly positively curved (curvature taper^2 on the tube)."""

    kind = "capped-cylinder"
    periodic_phi = True

    def __init__(self, l: float, blend: float = 0.2, taper: float = 0.02):
        if l <= 0 or blend <= 0 or not (0 < taper < 1):
            raise GeometryError("capped cylinder needs l, blend > 0 and 0 < taper < 1")
        self.l = float(l)
        self.blend = float(blend)
        self.taper = float(taper)
        self.code, self.params = _spec.pack(_spec.SURF_CAPPED, l, blend, taper)
        self.space_id = f"capped l={fmt(l)} blend={fmt(blend)}"
        self.s_pole = float(profile_pole(l, blend, taper))

    def validate_point(self, x):
        if abs(x[0]) >= self.s_pole - 1e-6:
            raise GeometryError("chart degenerate at the cap poles")

    def gauss_curvature(self, pts):
        pts = np.atleast_2d(pts)
        return profile_gauss(pts[:, 0], self.l, self.blend, self.taper)

    def sample_grid(self, n):
        s = np.linspace(-self.s_pole + 0.05, self.s_pole - 0.05, n)
        ph = np.linspace(-np.pi, np.pi, n)
        S, P = np.meshgrid(s, ph, indexing="ij")
        return np.stack([S.ravel(), P.ravel()], axis=1)

    def random_point(self, rng):
        return self.point([rng.uniform(-self.s_pole + 0.1, self.s_pole - 0.1),
                           rng.uniform(-np.pi, np.pi)])


class FlatPlane(Surface2D):
    kind = "flat-plane"

    def __init__(self):
        self.code, self.params = _spec.pack(_spec.EUCLIDEAN, 2.0)
        self.space_id = "plane"

    def gauss_curvature(self, pts):
        return np.zeros(len(np.atleast_2d(pts)))

    def sample_grid(self, n):
        s = np.linspace(-2, 2, n)
        X, Y = np.meshgrid(s, s, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def random_point(self, rng):
        return self.point(rng.uniform(-2, 2, 2))


@dataclass(frozen=True)
class Fiber:
    kind: str  # "line" | "circle"
    period: float = 0.0


class ProductSpace(AmbientSpace):
    """base^2 x R or base^2 x S^1 with the product metric; chart (u, v, t)."""

    dim = 3

    def __init__(self, base: Surface2D, fiber: Fiber = Fiber("line")):
        if fiber.kind not in ("line", "circle"):
            raise GeometryError("fiber must be line or circle")
        if fiber.kind == "circle" and fiber.period <= 0:
            raise GeometryError("circle fiber needs a positive period")
        self.base = base
        self.fiber = fiber
        if base.code == _spec.SURF_SPHERE:
            self.code, self.params = _spec.pack(_spec.PROD_SPHERE, *base.params)
        elif base.code == _spec.SURF_CAPPED:
            self.code, self.params = _spec.pack(_spec.PROD_CAPPED, *base.params)
        else:
            self.code, self.params = _spec.pack(_spec.EUCLIDEAN, 3.0)
        fs = "line" if fiber.kind == "line" else f"circle period={fmt(fiber.period)}"
        self.space_id = f"product base=({base.space_id}) fiber=({fs})"
        self.has_killing_field = True

    def validate_point(self, x):
        self.base.validate_point(x[:2])

    def killing_vec(self, x):
        return np.array([0.0, 0.0, 1.0])

    def killing_jet(self):
        return geo.ConstantField(np.array([0.0, 0.0, 1.0]))

    def random_point(self, rng):
        b = self.base.random_point(rng).coords
        return self.point([b[0], b[1], rng.uniform(-2, 2)])


# ---------------------------------------------------------------------------
# Killing utilities
# ---------------------------------------------------------------------------

def killing_field(space: AmbientSpace, p) -> TangentVec:
    """The unit vertical Killing field at p."""
    if not space.has_killing_field:
        raise GeometryError(f"{space.space_id} has no Killing fiber field")
    x = geo.check_point(space, p)
    base = p if isinstance(p, ChartPoint) else ChartPoint(x, space.space_id)
    return TangentVec(space.killing_vec(x), base)


def horizontal_unit(space: AmbientSpace, p, seed_axis: int = 0) -> np.ndarray:
    """A unit vector g-orthogonal to the Killing field (and, on the Berger
    sphere, tangent to the constraint sphere)."""
    x = geo.check_point(space, p)
    g = geo.metric_matrix(space, p).g
    xi = space.killing_vec(x)
    cands = list(np.eye(space.dim))
    if isinstance(space, BergerSphere):
        cands = [E1_MAT @ x, E2_MAT @ x]
    best, best_norm = None, -1.0
    for k, c in enumerate(cands):
        if k < seed_axis:
            continue
        if isinstance(space, BergerSphere):
            c = c - (c @ x) / (x @ x) * x
        c = c - (c @ g @ xi) / (xi @ g @ xi) * xi
        nrm = float(c @ g @ c)
        if nrm > best_norm:
            best, best_norm = c, nrm
    if best is None or best_norm <= 1e-12:
        raise GeometryError("could not build a horizontal direction")
    return best / np.sqrt(best_norm)


def tau_estimate(space: AmbientSpace, p, X: np.ndarray | None = None) -> float:
    """The bundle-curvature scalar: the tau with nab_X xi = tau (X ^ xi) for
    horizontal unit X. Defined for the Killing-submersion models."""
    if not isinstance(space, (BergerSphere, Heisenberg)):
        raise GeometryError("tau_estimate needs a Killing submersion model")
    x = geo.check_point(space, p)
    if X is None:
        X = horizontal_unit(space, p)
    g = geo.metric_matrix(space, p).g
    cov = geo.covariant_derivative(space, p, X, space.killing_jet()).components
    w = geo.wedge(space, p, X, space.killing_vec(x))
    wn = float(w @ g @ w)
    if wn < 1e-20:
        raise GeometryError("degenerate X ^ xi")
    return float((cov @ g @ w) / wn)


def killing_flow(space: AmbientSpace, p, t: float) -> ChartPoint:
    """Flow of the unit Killing field for parameter time t."""
    x = geo.check_point(space, p)
    if isinstance(space, BergerSphere):
        ang = space.kappa * t / (4.0 * abs(space.tau))
        c, s = np.cos(ang), np.sin(ang)
        rot = c * np.eye(4) + s * J4
        return space.point(rot @ x)
    if isinstance(space, Heisenberg):
        return space.point(x + np.array([0.0, 0.0, t]))
    if isinstance(space, (ProductSpace, EuclideanSpace)):
        y = x.copy()
        y[-1] += t
        if isinstance(space, ProductSpace) and space.fiber.kind == "circle":
            per = space.fiber.period
            y[-1] = (y[-1] + per / 2) % per - per / 2
        return space.point(y)
    raise GeometryError(f"{space.space_id} has no Killing flow")


def killing_differential(space: AmbientSpace, p, t: float, v: np.ndarray) -> np.ndarray:
    """d(phi_t) applied to v; used to check the isometry property."""
    if isinstance(space, BergerSphere):
        ang = space.kappa * t / (4.0 * abs(space.tau))
        rot = np.cos(ang) * np.eye(4) + np.sin(ang) * J4
        return rot @ v
    return np.asarray(v, dtype=np.float64).copy()


def pinching_ratio(surface: Surface2D, samples: np.ndarray | int = 64):
    """(kappa_minus, kappa_plus, ratio) of the Gauss curvature over a sample
    grid. Raises if any sample has non-positive curvature."""
    pts = surface.sample_grid(samples) if isinstance(samples, int) else np.atleast_2d(samples)
    K = surface.gauss_curvature(pts)
    if np.any(K <= 0):
        bad = pts[np.argmin(K)]
        raise GeometryError(
            f"non-positive curvature sample K={K.min():.3e} at {bad}; "
            "pinching is defined for strictly positive curvature"
        )
    kmin, kmax = float(K.min()), float(K.max())
    return kmin, kmax, kmin / kmax


# ---------------------------------------------------------------------------
# space-spec grammar
# ---------------------------------------------------------------------------

def fmt(x: float) -> str:
    return f"{x:g}"


def parse_space(text: str) -> AmbientSpace:
    """Parse the space grammar:

    berger kappa=<f> tau=<f>
    heisenberg tau=<f>
    product base=(sphere r=<f> | capped l=<f> blend=<f> | plane) fiber=(line | circle period=<f>)
    euclidean dim=<n>
    sphere r=<f> | capped l=<f> blend=<f> | plane      (2D base surfaces)
    """
    head, kv, groups = _parse_clause(text)
    try:
        if head == "berger":
            return BergerSphere(float(kv["kappa"]), float(kv["tau"]))
        if head == "heisenberg":
            return Heisenberg(float(kv["tau"]))
        if head == "euclidean":
            return EuclideanSpace(int(float(kv.get("dim", 3))))
        if head in ("sphere", "capped", "plane"):
            return _parse_surface2d(head, kv)
        if head == "product":
            bh, bkv, _ = _parse_clause(groups["base"])
            base = _parse_surface2d(bh, bkv)
            fh, fkv, _ = _parse_clause(groups["fiber"])
            if fh == "line":
                fiber = Fiber("line")
            elif fh == "circle":
                fiber = Fiber("circle", float(fkv["period"]))
            else:
                raise GeometryError(f"unknown fiber {fh!r}")
            return ProductSpace(base, fiber)
    except KeyError as exc:
        raise GeometryError(f"space spec {text!r} is missing parameter {exc}") from exc
    raise GeometryError(f"unknown space spec {text!r}")


def _parse_surface2d(head: str, kv: dict) -> Surface2D:
    if head == "sphere":
        return RoundSphere(float(kv.get("r", 1.0)))
    if head == "capped":
        return CappedCylinder(float(kv["l"]), float(kv.get("blend", 0.2)),
                              float(kv.get("taper", 0.02)))
    if head == "plane":
        return FlatPlane()
    raise GeometryError(f"unknown base surface {head!r}")


def _parse_clause(text: str):
    """Split 'head key=value key=(group words)' into parts."""
    text = text.strip()
    if not text:
        raise GeometryError("empty spec")
    tokens = []
    depth = 0
    cur = ""
    for ch in text:
        if ch == "(":
            depth += 1
            cur += ch
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise GeometryError(f"unbalanced parentheses in {text!r}")
            cur += ch
        elif ch.isspace() and depth == 0:
            if cur:
                tokens.append(cur)
            cur = ""
        else:
            cur += ch
    if depth != 0:
        raise GeometryError(f"unbalanced parentheses in {text!r}")
    if cur:
        tokens.append(cur)
    head = tokens[0].lower()
    kv: dict[str, str] = {}
    groups: dict[str, str] = {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise GeometryError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if val.startswith("(") and val.endswith(")"):
            groups[key.lower()] = val[1:-1]
        else:
            kv[key.lower()] = val
    return head, kv, groups
