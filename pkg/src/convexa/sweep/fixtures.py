"""Mesh fixture generators for the sweep classifier and its tests.

All fixtures come back as TriMesh objects bound to their ambient space, with
consistent orientation and declared truncation heights where they have ends.
"""
from __future__ import annotations

import numpy as np

from convexa.geometry import GeometryError
from convexa.immersion import ParametricSurface
from convexa.spaces import (
    AmbientSpace,
    CappedCylinder,
    Fiber,
    FlatPlane,
    Heisenberg,
    ProductSpace,
    RoundSphere,
    Surface2D,
)
from convexa.sweep.mesh import TriMesh


def _base_point(base: Surface2D, center, dist, bearing):
    if isinstance(base, RoundSphere):
        return base.point_at(center, dist, bearing)
    # flat / capped charts: metric-euclidean circles around the center
    return np.array([center[0] + dist * np.cos(bearing),
                     center[1] + dist * np.sin(bearing)])


def revolution_mesh(space: ProductSpace, center, dist_fn, height_fn,
                    n_lat: int, n_lon: int, name: str = "") -> TriMesh:
    """Closed surface of revolution about the fiber through `center`:
    ring i at parameter a_i in (0, pi) has base radius dist_fn(a_i) and
    height height_fn(a_i); poles close both ends."""
    alphas = np.linspace(0.0, np.pi, n_lat + 1)
    betas = np.linspace(0.0, 2 * np.pi, n_lon, endpoint=False)
    verts = [np.array([center[0], center[1], height_fn(0.0)])]
    for a in alphas[1:-1]:
        d = dist_fn(a)
        h = height_fn(a)
        for b in betas:
            bp = _base_point(space.base, center, d, b)
            verts.append(np.array([bp[0], bp[1], h]))
    verts.append(np.array([center[0], center[1], height_fn(np.pi)]))
    verts = np.array(verts)
    tris = []
    top = 0
    bot = len(verts) - 1

    def ring(i, j):
        return 1 + i * n_lon + (j % n_lon)

    for j in range(n_lon):
        tris.append((top, ring(0, j), ring(0, j + 1)))
    for i in range(n_lat - 2):
        for j in range(n_lon):
            a, b_, c, d = ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1)
            tris.append((a, b_, c))
            tris.append((a, c, d))
    for j in range(n_lon):
        tris.append((bot, ring(n_lat - 2, j + 1), ring(n_lat - 2, j)))
    return TriMesh(verts, np.array(tris, dtype=np.int64), space=space, name=name)


def sphere_fixture(radius: float = 0.3, center=(np.pi / 2, 0.0, 0.7),
                   n_lat: int = 36, n_lon: int = 36,
                   base_radius: float = 1.0) -> TriMesh:
    """Geodesic sphere of the product metric about a point of S^2 x R."""
    space = ProductSpace(RoundSphere(base_radius), Fiber("line"))
    c = np.asarray(center, dtype=np.float64)
    return revolution_mesh(
        space, c[:2],
        dist_fn=lambda a: radius * np.sin(a),
        height_fn=lambda a: c[2] + radius * np.cos(a),
        n_lat=n_lat, n_lon=n_lon, name="sphere")


def egg_fixture(radius: float = 0.3, center=(np.pi / 2, 0.0, 0.7),
                skew: float = 0.08, n_lat: int = 36, n_lon: int = 36) -> TriMesh:
    """Convex rotational surface without top-bottom mirror symmetry."""
    space = ProductSpace(RoundSphere(1.0), Fiber("line"))
    c = np.asarray(center, dtype=np.float64)
    return revolution_mesh(
        space, c[:2],
        dist_fn=lambda a: radius * np.sin(a),
        height_fn=lambda a: c[2] + 1.15 * radius * np.cos(a) + skew * np.cos(a) ** 2,
        n_lat=n_lat, n_lon=n_lon, name="egg")


def two_spheres_fixture(radius: float = 0.3, separation: float = 1.4,
                        n_lat: int = 24, n_lon: int = 24) -> TriMesh:
    """Two disjoint geodesic spheres at the same heights, side by side."""
    a = sphere_fixture(radius, (np.pi / 2, -separation / 2, 0.7), n_lat, n_lon)
    b = sphere_fixture(radius, (np.pi / 2, +separation / 2, 0.7), n_lat, n_lon)
    verts = np.vstack([a.vertices, b.vertices])
    tris = np.vstack([a.triangles, b.triangles + len(a.vertices)])
    return TriMesh(verts, tris, space=a.space, name="two-spheres")


def graph_fixture(disk_radius: float = 0.8, t_max: float = 4.0,
                  n_rings: int = 40, n_lon: int = 48) -> TriMesh:
    """Entire convex graph t = 1/(r0 - rho) - 1/r0 over a geodesic disk of
    S^2, truncated at t_max; single top end."""
    space = ProductSpace(RoundSphere(1.0), Fiber("line"))
    center = np.array([np.pi / 2, 0.0])
    r0 = disk_radius
    rho_max = r0 - 1.0 / (t_max + 1.0 / r0)

    def height(rho):
        return 1.0 / (r0 - rho) - 1.0 / r0

    # grade ring radii so ring heights are roughly uniform in t
    ts = np.linspace(0.0, t_max, n_rings + 1)[1:]
    rhos = r0 - 1.0 / (ts + 1.0 / r0)
    verts = [np.array([center[0], center[1], 0.0])]
    for rho in rhos:
        h = height(rho)
        for b in np.linspace(0.0, 2 * np.pi, n_lon, endpoint=False):
            bp = _base_point(space.base, center, rho, b)
            verts.append(np.array([bp[0], bp[1], h]))
    verts = np.array(verts)

    def ring(i, j):
        return 1 + i * n_lon + (j % n_lon)

    tris = []
    for j in range(n_lon):
        tris.append((0, ring(0, j), ring(0, j + 1)))
    for i in range(n_rings - 1):
        for j in range(n_lon):
            a, b_, c, d = ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1)
            tris.append((a, b_, c))
            tris.append((a, c, d))
    return TriMesh(verts, np.array(tris, dtype=np.int64), space=space,
                   truncation_hi=float(height(rhos[-1])), name="graph")


def wrap_tube_fixture(r0: float = 3.6, l: float = 10.0, blend: float = 0.2,
                      n_levels: int = 48, n_lon: int = 72) -> TriMesh:
    """Tube of expanding-then-contracting circles drawn on the almost-flat
    tube of a capped cylinder. The mid circles are longer than the cylinder
    girth, so they wrap around and the surface is immersed, not embedded.
    Closed (sphere-like) but self-intersecting for r0 > pi."""
    base = CappedCylinder(l, blend)
    space = ProductSpace(base, Fiber("line"))
    center = np.array([0.0, 0.0])

    def rho(t):
        return min(t, 2 * r0 - t)

    ts = np.linspace(0.0, 2 * r0, n_levels + 1)
    verts = [np.array([center[0], center[1], 0.0])]
    for t in ts[1:-1]:
        d = rho(t)
        for b in np.linspace(0.0, 2 * np.pi, n_lon, endpoint=False):
            # chart circle: phi coordinate kept unwrapped (universal cover)
            verts.append(np.array([center[0] + d * np.cos(b),
                                   center[1] + d * np.sin(b), t]))
    verts.append(np.array([center[0], center[1], 2 * r0]))
    verts = np.array(verts)
    top = 0
    bot = len(verts) - 1

    def ring(i, j):
        return 1 + i * n_lon + (j % n_lon)

    tris = []
    for j in range(n_lon):
        tris.append((top, ring(0, j), ring(0, j + 1)))
    for i in range(n_levels - 2):
        for j in range(n_lon):
            a, b_, c, d = ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1)
            tris.append((a, b_, c))
            tris.append((a, c, d))
    for j in range(n_lon):
        tris.append((bot, ring(n_levels - 2, j + 1), ring(n_levels - 2, j)))
    return TriMesh(verts, np.array(tris, dtype=np.int64), space=space, name="wrap-tube")


def torus_fixture(R: float = 1.0, r: float = 0.4, n_u: int = 32,
                  n_v: int = 48) -> TriMesh:
    """Torus of revolution in plane x R (flat product chart)."""
    space = ProductSpace(FlatPlane(), Fiber("line"))
    verts = []
    for i in range(n_u):
        u = 2 * np.pi * i / n_u
        for j in range(n_v):
            v = 2 * np.pi * j / n_v
            verts.append(np.array([(R + r * np.cos(u)) * np.cos(v),
                                   (R + r * np.cos(u)) * np.sin(v),
                                   r * np.sin(u)]))
    verts = np.array(verts)

    def vid(i, j):
        return (i % n_u) * n_v + (j % n_v)

    tris = []
    for i in range(n_u):
        for j in range(n_v):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return TriMesh(verts, np.array(tris, dtype=np.int64), space=space, name="torus")


def heis_graph_fixture(tau: float = 0.5, disk_radius: float = 0.8,
                       n_rings: int = 24, n_lon: int = 36) -> TriMesh:
    """The paraboloid Killing graph z = x^2 + y^2 in Heisenberg space."""
    space = Heisenberg(tau)
    verts = [np.array([0.0, 0.0, 0.0])]
    rhos = np.linspace(0.0, disk_radius, n_rings + 1)[1:]
    for rho in rhos:
        for b in np.linspace(0.0, 2 * np.pi, n_lon, endpoint=False):
            x, y = rho * np.cos(b), rho * np.sin(b)
            verts.append(np.array([x, y, x * x + y * y]))
    verts = np.array(verts)

    def ring(i, j):
        return 1 + i * n_lon + (j % n_lon)

    tris = []
    for j in range(n_lon):
        tris.append((0, ring(0, j), ring(0, j + 1)))
    for i in range(n_rings - 1):
        for j in range(n_lon):
            a, b_, c, d = ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1)
            tris.append((a, b_, c))
            tris.append((a, c, d))
    return TriMesh(verts, np.array(tris, dtype=np.int64), space=space, name="heis-graph")


def heis_plane_fixture(tau: float = 0.5, direction: float = 0.0,
                       extent: float = 2.0, n: int = 24) -> TriMesh:
    """A vertical plane patch in Heisenberg space (nu = 0 everywhere)."""
    space = Heisenberg(tau)
    c, s = np.cos(direction), np.sin(direction)
    us = np.linspace(-extent, extent, n)
    vs = np.linspace(-extent, extent, n)
    verts = np.array([[u * c, u * s, v] for u in us for v in vs])
    tris = []
    for i in range(n - 1):
        for j in range(n - 1):
            a = i * n + j
            b = (i + 1) * n + j
            cc = (i + 1) * n + j + 1
            d = i * n + j + 1
            tris.append((a, b, cc))
            tris.append((a, cc, d))
    return TriMesh(verts, np.array(tris, dtype=np.int64), space=space, name="heis-plane")


def mesh_from_surface(surface: ParametricSurface, space: AmbientSpace,
                      n_u: int = 40, n_v: int = 40) -> TriMesh:
    """Open-patch triangulation of a parametric surface (chart 3-manifolds)."""
    (u0, u1), (v0, v1) = surface.domain
    us = np.linspace(u0, u1, n_u)
    vs = np.linspace(v0, v1, n_v)
    U, V = np.meshgrid(us, vs, indexing="ij")
    P = surface.map(U.ravel(), V.ravel())
    if P.shape[1] != 3:
        raise GeometryError("mesh_from_surface needs a 3-coordinate chart")
    tris = []
    for i in range(n_u - 1):
        for j in range(n_v - 1):
            a = i * n_v + j
            b = (i + 1) * n_v + j
            c = (i + 1) * n_v + j + 1
            d = i * n_v + j + 1
            tris.append((a, b, c))
            tris.append((a, c, d))
    return TriMesh(P, np.array(tris, dtype=np.int64), space=space,
                   name=surface.family)


FIXTURES = {
    "sphere": sphere_fixture,
    "egg": egg_fixture,
    "two-spheres": two_spheres_fixture,
    "graph": graph_fixture,
    "wrap-tube": wrap_tube_fixture,
    "torus": torus_fixture,
    "heis-graph": heis_graph_fixture,
    "heis-plane": heis_plane_fixture,
}


def make_fixture(kind: str, **kwargs) -> TriMesh:
    if kind not in FIXTURES:
        raise GeometryError(f"unknown fixture {kind!r}; have {sorted(FIXTURES)}")
    return FIXTURES[kind](**kwargs)
