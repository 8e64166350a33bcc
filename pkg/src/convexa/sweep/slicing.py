"""Marching-triangles level-set extraction of sweep slices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LineString

from convexa.sweep.mesh import MeshError, TriMesh

PERTURB = 1e-9


@dataclass
class Polyline:
    points: np.ndarray          # [k, 3] chart points along the curve
    closed: bool
    self_intersecting: bool = False

    def base(self) -> np.ndarray:
        return self.points[:, :2]

    def __len__(self):
        return len(self.points)


@dataclass
class SliceCurve:
    level: float
    components: list[Polyline] = field(default_factory=list)

    @property
    def n_closed(self):
        return sum(1 for c in self.components if c.closed)


def slice_mesh(mesh: TriMesh, t: float, values: np.ndarray | None = None) -> SliceCurve:
    """Extract the level set {h = t} of the sweep functional h.

    `values` defaults to the vertex heights. Levels hitting a vertex value
    exactly are nudged by 1e-9 (relative to the value range) so the marching
    stays total.

    Crossing edges of the triangulation are the nodes of a degree-<=2 graph
    whose edges are the per-triangle segments; open chains start at boundary
    crossings, everything else closes into loops.
    """
    h = mesh.heights() if values is None else np.asarray(values, dtype=np.float64)
    if len(h) != len(mesh.vertices):
        raise MeshError("functional values must be per-vertex")
    scale = max(float(np.max(h) - np.min(h)), 1.0)
    level = float(t)
    for _ in range(40):
        if len(h) == 0 or np.min(np.abs(h - level)) > PERTURB * scale * 0.5:
            break
        level += PERTURB * scale
    side = h > level

    s = side[mesh.triangles]
    mixed = np.where(s.any(axis=1) & ~s.all(axis=1))[0]
    seg_points: dict[tuple[int, int], np.ndarray] = {}
    nxt: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for ti in mixed:
        a, b, c = mesh.triangles[ti]
        crossing = []
        for i, j in ((a, b), (b, c), (c, a)):
            if side[i] != side[j]:
                crossing.append((min(i, j), max(i, j)))
        if len(crossing) != 2:
            continue
        for i, j in crossing:
            if (i, j) not in seg_points:
                lam = (level - h[i]) / (h[j] - h[i])
                seg_points[(i, j)] = mesh.vertices[i] + lam * (mesh.vertices[j] - mesh.vertices[i])
        e1, e2 = crossing
        nxt.setdefault(e1, []).append(e2)
        nxt.setdefault(e2, []).append(e1)

    visited: set = set()
    chains = []
    for start in [e for e in nxt if len(nxt[e]) == 1]:
        if start not in visited:
            chains.append((_walk(start, nxt, visited), False))
    for start in nxt:
        if start not in visited:
            chains.append((_walk(start, nxt, visited), True))

    out = SliceCurve(level=level)
    for chain, closed in chains:
        if len(chain) < 2:
            continue
        pts = np.array([seg_points[e] for e in chain])
        poly = Polyline(points=pts, closed=closed)
        if closed and len(pts) >= 4:
            ring = np.vstack([pts[:, :2], pts[:1, :2]])
            poly.self_intersecting = not LineString(ring).is_simple
        out.components.append(poly)
    return out


def _walk(start, nxt, visited):
    chain = [start]
    visited.add(start)
    cur, prev = start, None
    while True:
        cands = [e for e in nxt[cur] if e != prev and e not in visited]
        if not cands:
            break
        prev, cur = cur, cands[0]
        chain.append(cur)
        visited.add(cur)
    return chain
