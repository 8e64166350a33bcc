"""Killing-graph and Alexandrov bi-graph checks on meshes."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from shapely.geometry import Polygon
from shapely.ops import unary_union

from convexa import backend as _backend
from convexa.spaces import AmbientSpace
from convexa.sweep.mesh import MeshError, TriMesh


@dataclass
class GraphCheck:
    ok: bool
    nu_nonzero: bool
    injective: bool
    min_abs_nu: float
    witness: dict


def triangle_normals_nu(mesh: TriMesh, space: AmbientSpace):
    """Per-triangle unit normal (at the centroid, in the ambient metric) and
    its angle function against the Killing field."""
    tc = mesh.corners()
    cen = tc.mean(axis=1)
    e1 = tc[:, 1] - tc[:, 0]
    e2 = tc[:, 2] - tc[:, 0]
    kb = _backend.get_backend()
    g = kb.metric(space.code, space.params, cen)
    low = np.cross(e1, e2)
    N = np.linalg.solve(g, low[..., None])[..., 0]
    N /= np.sqrt(np.einsum("nij,ni,nj->n", g, N, N))[:, None]
    xi = kb.killing(space.code, space.params, cen)
    nu = np.einsum("nij,ni,nj->n", g, N, xi)
    return N, nu


def _projected(mesh: TriMesh, projector):
    tc = mesh.corners()
    flat = tc.reshape(-1, 3)
    return projector(flat).reshape(len(tc), 3, 2)


def _overlap_pairs(tris2d, tri_idx, period=0.0, early_exit=False):
    """Non-adjacent triangle pairs whose 2D projections overlap with
    positive area (strict separating-axis margin)."""
    out = []
    shifts = [0.0] + ([period] if period else [])
    lo = tris2d.min(axis=1)
    hi = tris2d.max(axis=1)
    scale = float(np.max(hi - lo)) + 1e-12
    band = 1e-9 * scale
    cell = max(float(np.median((hi - lo).max(axis=1))) * 2.0, 1e-9)
    origin = lo.min(axis=0) - (period if period else 0.0)

    grid: dict[tuple, list[int]] = {}
    c0 = np.floor((lo - origin) / cell).astype(np.int64)
    c1 = np.floor((hi - origin) / cell).astype(np.int64)
    for t in range(len(tris2d)):
        for cx in range(c0[t, 0], c1[t, 0] + 1):
            for cy in range(c0[t, 1], c1[t, 1] + 1):
                grid.setdefault((cx, cy), []).append(t)

    def adjacent(i, j):
        return bool(set(tri_idx[i]) & set(tri_idx[j]))

    seen = set()
    for shift in shifts:
        if shift == 0.0:
            cand = set()
            for members in grid.values():
                for i, j in combinations(members, 2):
                    cand.add((i, j))
        else:
            cand = set()
            s0 = np.floor((lo + [0.0, 0.0] - origin) / cell).astype(np.int64)
            lo2 = lo.copy()
            hi2 = hi.copy()
            lo2[:, 0] += shift
            hi2[:, 0] += shift
            d0 = np.floor((lo2 - origin) / cell).astype(np.int64)
            d1 = np.floor((hi2 - origin) / cell).astype(np.int64)
            for t in range(len(tris2d)):
                for cx in range(d0[t, 0], d1[t, 0] + 1):
                    for cy in range(d0[t, 1], d1[t, 1] + 1):
                        for i in grid.get((cx, cy), ()):
                            if i != t:
                                cand.add((i, t))
        for i, j in cand:
            key = (min(i, j), max(i, j), shift)
            if key in seen or adjacent(i, j):
                continue
            seen.add(key)
            b = tris2d[j].copy()
            if shift:
                b[:, 0] += shift
            if _sat_overlap(tris2d[i], b, band):
                out.append((min(i, j), max(i, j)))
                if early_exit:
                    return out
    return out


def _sat_overlap(a, b, band) -> bool:
    for tri in (a, b):
        for i in range(3):
            e = tri[(i + 1) % 3] - tri[i]
            n = np.array([-e[1], e[0]])
            nn = np.linalg.norm(n) + 1e-300
            pa = a @ n
            pb = b @ n
            gap = max(pb.min() - pa.max(), pa.min() - pb.max())
            if gap > -band * nn:
                return False
    return True


def base_projector(space: AmbientSpace):
    """Projection of chart points to the submersion base: drop the fiber."""
    return lambda pts: pts[:, :2]


def killing_graph_check(mesh_or_surface, space: AmbientSpace, grid_n: int = 40,
                        nu_tol: float = 1e-10) -> GraphCheck:
    """True iff nu != 0 at all samples and the base projection is injective
    (no two non-adjacent triangles project onto overlapping base regions).
    Parametric surfaces are sampled into a mesh first."""
    from convexa.sweep.fixtures import mesh_from_surface  # local import: cycle
    from convexa.immersion import ParametricSurface

    if isinstance(mesh_or_surface, ParametricSurface):
        mesh = mesh_from_surface(mesh_or_surface, space, grid_n, grid_n)
    else:
        mesh = mesh_or_surface
    _, nu = triangle_normals_nu(mesh, space)
    min_nu = float(np.min(np.abs(nu)))
    nu_ok = min_nu > nu_tol
    period = mesh.phi_period
    tris2d = _projected(mesh, base_projector(space))
    over = _overlap_pairs(tris2d, mesh.triangles, period=period, early_exit=True)
    injective = not over
    witness = {}
    if not nu_ok:
        witness["nu_zero_triangle"] = int(np.argmin(np.abs(nu)))
    if over:
        witness["overlapping_projection_pair"] = list(map(int, over[0]))
    return GraphCheck(ok=nu_ok and injective, nu_nonzero=nu_ok,
                      injective=injective, min_abs_nu=min_nu, witness=witness)


def alexandrov_bigraph(mesh: TriMesh, dt: float | None = None):
    """A level t0 splitting the closed surface into two Killing graphs over a
    common footprint (symmetric-difference area below 1%), or None."""
    info = mesh.validate()
    if not info.closed or info.euler != 2:
        raise MeshError("bi-graph search needs a closed sphere-topology mesh")
    h = mesh.heights()
    hmin, hmax = float(h.min()), float(h.max())
    if dt is None:
        dt = (hmax - hmin) / 24.0
    tc = mesh.corners()
    cen_h = tc[:, :, 2].mean(axis=1)
    tris2d = _projected(mesh, lambda pts: pts[:, :2])
    period = mesh.phi_period
    best = None
    for t0 in np.arange(hmin + 1.5 * dt, hmax - dt, dt):
        up = np.where(cen_h > t0)[0]
        lo_ = np.where(cen_h <= t0)[0]
        if len(up) == 0 or len(lo_) == 0:
            continue
        ok = True
        for part in (up, lo_):
            if _overlap_pairs(tris2d[part], mesh.triangles[part], period=period,
                              early_exit=True):
                ok = False
                break
        if not ok:
            continue
        area_up, poly_up = _footprint_poly(tris2d[up])
        area_lo, poly_lo = _footprint_poly(tris2d[lo_])
        union = poly_up.union(poly_lo)
        sym = poly_up.symmetric_difference(poly_lo).area
        ratio = sym / max(union.area, 1e-300)
        if ratio < 0.01 and (best is None or ratio < best[1]):
            best = (float(t0), ratio)
    return None if best is None else best[0]


def _footprint_poly(tris2d):
    polys = []
    for t in tris2d:
        p = Polygon(t)
        if p.is_valid and p.area > 0:
            polys.append(p)
    u = unary_union(polys)
    return u.area, u
