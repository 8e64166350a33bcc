"""Mesh self-intersection detection.

Uniform-grid candidate generation over triangle bounding boxes, a fast
batched triangle-triangle test from the selected kernel backend, and an
exact rational-arithmetic fallback for the pairs the fast test flags as
borderline. Periodic base charts are handled by additionally testing every
candidate pair against a one-period shift of the second triangle.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from convexa import backend as _backend
from convexa.sweep.mesh import TriMesh


def self_intersect(mesh: TriMesh, cell_scale: float = 2.0) -> list[tuple[int, int]]:
    """All non-adjacent triangle pairs with nonempty geometric intersection
    (in chart coordinates, modulo the base chart period). Empty list means
    embedded at mesh resolution."""
    tris = mesh.corners()
    m = len(tris)
    if m == 0:
        return []
    shifts = [0.0]
    per = mesh.phi_period
    if per:
        shifts.append(per)

    kb = _backend.get_backend()
    out = set()
    tri_idx = mesh.triangles
    for shift in shifts:
        pairs = _candidate_pairs(tris, shift, cell_scale, ordered=shift != 0.0)
        if not len(pairs):
            continue
        share = _shares_vertex(tri_idx, pairs)
        pairs = pairs[~share]
        if not len(pairs):
            continue
        A = tris[pairs[:, 0]]
        B = tris[pairs[:, 1]].copy()
        if shift:
            B[:, :, 1] += shift
        hit, unc = kb.tri_pairs_intersect(A, B)
        for k in np.where(unc)[0]:
            hit[k] = tri_tri_exact(A[k], B[k])
        for i, j in pairs[hit]:
            out.add((min(i, j), max(i, j)))
    return sorted(out)


def _shares_vertex(tri_idx, pairs):
    a = tri_idx[pairs[:, 0]]
    b = tri_idx[pairs[:, 1]]
    share = np.zeros(len(pairs), dtype=bool)
    for i in range(3):
        for j in range(3):
            share |= a[:, i] == b[:, j]
    return share


def _candidate_pairs(tris, shift, cell_scale, ordered):
    """AABB grid hashing; `ordered` pairs (i, j), i != j, are needed for the
    shifted tests since shifting is not symmetric."""
    lo = tris.min(axis=1)
    hi = tris.max(axis=1)
    if shift:
        lo2 = lo.copy()
        hi2 = hi.copy()
        lo2[:, 1] += shift
        hi2[:, 1] += shift
    else:
        lo2, hi2 = lo, hi
    ext = hi - lo
    cell = max(float(np.median(ext.max(axis=1))) * cell_scale, 1e-9)
    allo = np.minimum(lo.min(axis=0), lo2.min(axis=0))

    def cells_of(l, u):
        c0 = np.floor((l - allo) / cell).astype(np.int64)
        c1 = np.floor((u - allo) / cell).astype(np.int64)
        return c0, c1

    grid: dict[tuple, list[int]] = {}
    c0, c1 = cells_of(lo, hi)
    for t in range(len(tris)):
        for cx in range(c0[t, 0], c1[t, 0] + 1):
            for cy in range(c0[t, 1], c1[t, 1] + 1):
                for cz in range(c0[t, 2], c1[t, 2] + 1):
                    grid.setdefault((cx, cy, cz), []).append(t)
    pairs = set()
    if not shift:
        for members in grid.values():
            if len(members) > 1:
                for i, j in combinations(members, 2):
                    if _boxes_touch(lo[i], hi[i], lo[j], hi[j]):
                        pairs.add((i, j))
    else:
        d0, d1 = cells_of(lo2, hi2)
        for t in range(len(tris)):
            seen = set()
            for cx in range(d0[t, 0], d1[t, 0] + 1):
                for cy in range(d0[t, 1], d1[t, 1] + 1):
                    for cz in range(d0[t, 2], d1[t, 2] + 1):
                        for i in grid.get((cx, cy, cz), ()):
                            if i != t and i not in seen:
                                seen.add(i)
                                if _boxes_touch(lo[i], hi[i], lo2[t], hi2[t]):
                                    pairs.add((i, t))
    return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)


def _boxes_touch(l1, u1, l2, u2):
    return bool(np.all(l1 <= u2) and np.all(l2 <= u1))


# ---------------------------------------------------------------------------
# exact-arithmetic fallback
# ---------------------------------------------------------------------------

def _orient3d(a, b, c, d):
    """Sign of det[b-a, c-a, d-a] in exact rational arithmetic."""
    m = [[Fraction(b[i]) - Fraction(a[i]) for i in range(3)],
         [Fraction(c[i]) - Fraction(a[i]) for i in range(3)],
         [Fraction(d[i]) - Fraction(a[i]) for i in range(3)]]
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    return (det > 0) - (det < 0)


def _seg_crosses_plane_in_triangle(p, q, tri):
    """Exact test: does segment pq meet the triangle (coplanar handled by
    the caller)? Touching contacts count as intersections."""
    sp = _orient3d(tri[0], tri[1], tri[2], p)
    sq = _orient3d(tri[0], tri[1], tri[2], q)
    if sp == sq:
        return False
    a, b, c = tri
    s1 = _orient3d(p, q, a, b)
    s2 = _orient3d(p, q, b, c)
    s3 = _orient3d(p, q, c, a)
    return (s1 >= 0 and s2 >= 0 and s3 >= 0) or (s1 <= 0 and s2 <= 0 and s3 <= 0)


def tri_tri_exact(A, B) -> bool:
    """Exact rational triangle-triangle intersection decision."""
    A = [tuple(map(float, v)) for v in A]
    B = [tuple(map(float, v)) for v in B]
    sB = [_orient3d(A[0], A[1], A[2], v) for v in B]
    sA = [_orient3d(B[0], B[1], B[2], v) for v in A]
    if all(s > 0 for s in sB) or all(s < 0 for s in sB):
        return False
    if all(s > 0 for s in sA) or all(s < 0 for s in sA):
        return False
    if all(s == 0 for s in sB):
        return _coplanar_exact(A, B)
    for i in range(3):
        p, q = A[i], A[(i + 1) % 3]
        if _seg_crosses_plane_in_triangle(p, q, B):
            return True
    for i in range(3):
        p, q = B[i], B[(i + 1) % 3]
        if _seg_crosses_plane_in_triangle(p, q, A):
            return True
    return False


def _coplanar_exact(A, B) -> bool:
    n = np.cross(np.subtract(A[1], A[0]), np.subtract(A[2], A[0]))
    drop = int(np.argmax(np.abs(n)))
    keep = [i for i in range(3) if i != drop]
    A2 = [(Fraction(v[keep[0]]), Fraction(v[keep[1]])) for v in A]
    B2 = [(Fraction(v[keep[0]]), Fraction(v[keep[1]])) for v in B]
    for tri in (A2, B2):
        for i in range(3):
            ex = tri[(i + 1) % 3][0] - tri[i][0]
            ey = tri[(i + 1) % 3][1] - tri[i][1]
            nx, ny = -ey, ex
            pa = [nx * v[0] + ny * v[1] for v in A2]
            pb = [nx * v[0] + ny * v[1] for v in B2]
            if max(pa) < min(pb) or max(pb) < min(pa):
                return False
    return True
