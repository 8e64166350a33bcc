"""Triangulated immersed surfaces in chart coordinates, with OFF/OBJ I/O.

Vertices live in product coordinates (base u, base v, height t) or Heisenberg
coordinates (x, y, z). A `# space: <spec>` header comment binds the ambient
space; `# truncation: lo=<f> hi=<f>` declares truncation heights for meshes
with ends.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from convexa.geometry import GeometryError
from convexa.spaces import AmbientSpace, Heisenberg, ProductSpace, parse_space


class MeshError(GeometryError):
    pass


@dataclass
class MeshInfo:
    euler: int
    n_boundary_edges: int
    boundary_loops: list
    closed: bool


@dataclass
class TriMesh:
    vertices: np.ndarray            # [n, 3] chart coordinates
    triangles: np.ndarray           # [m, 3] vertex indices, oriented
    space: AmbientSpace | None = None
    truncation_lo: float | None = None
    truncation_hi: float | None = None
    name: str = ""

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64)
        self.triangles = np.asarray(self.triangles, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshError("vertices must be an [n, 3] array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshError("triangles must be an [m, 3] index array")

    # -- geometry helpers ---------------------------------------------------

    @property
    def phi_period(self) -> float:
        """Period of chart coordinate 1, when the bound base chart wraps."""
        if isinstance(self.space, ProductSpace) and getattr(self.space.base, "periodic_phi", False):
            return 2 * np.pi
        return 0.0

    def corners(self) -> np.ndarray:
        return self.vertices[self.triangles]  # [m, 3, 3]

    def heights(self) -> np.ndarray:
        return self.vertices[:, 2]

    def feature_size(self) -> float:
        tc = self.corners()
        e = np.concatenate([
            np.linalg.norm(tc[:, 1] - tc[:, 0], axis=1),
            np.linalg.norm(tc[:, 2] - tc[:, 1], axis=1),
            np.linalg.norm(tc[:, 0] - tc[:, 2], axis=1),
        ])
        return float(np.median(e))

    def edge_map(self):
        """Undirected edge -> list of (triangle index, oriented as stored)."""
        edges: dict[tuple[int, int], list[tuple[int, bool]]] = {}
        for t, (a, b, c) in enumerate(self.triangles):
            for i, j in ((a, b), (b, c), (c, a)):
                key = (min(i, j), max(i, j))
                edges.setdefault(key, []).append((t, i < j))
        return edges

    def validate(self) -> MeshInfo:
        """Manifoldness, orientability, nondegeneracy; returns mesh info."""
        n = len(self.vertices)
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= n):
            raise MeshError("triangle index out of range")
        tc = self.corners()
        areas = 0.5 * np.linalg.norm(
            np.cross(tc[:, 1] - tc[:, 0], tc[:, 2] - tc[:, 0]), axis=1)
        if np.any(areas <= 1e-12):
            raise MeshError(f"{int((areas <= 1e-12).sum())} degenerate (zero-area) triangles")
        edges = self.edge_map()
        boundary = []
        for key, uses in edges.items():
            if len(uses) > 2:
                raise MeshError(f"non-manifold edge {key}: {len(uses)} incident triangles")
            if len(uses) == 2:
                if uses[0][1] == uses[1][1]:
                    raise MeshError(f"inconsistent orientation across edge {key}")
            else:
                boundary.append(key)
        loops = _chain_loops(boundary)
        euler = n - len(edges) + len(self.triangles)
        return MeshInfo(euler=euler, n_boundary_edges=len(boundary),
                        boundary_loops=loops, closed=not boundary)

    def refined(self) -> "TriMesh":
        """One 4-to-1 midpoint subdivision (chart-linear: same point set)."""
        verts = list(self.vertices)
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                midpoint[key] = len(verts)
                verts.append(0.5 * (self.vertices[i] + self.vertices[j]))
            return midpoint[key]

        tris = []
        for a, b, c in self.triangles:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        return TriMesh(np.array(verts), np.array(tris), space=self.space,
                       truncation_lo=self.truncation_lo, truncation_hi=self.truncation_hi,
                       name=self.name)

    def translated(self, dz: float) -> "TriMesh":
        v = self.vertices.copy()
        v[:, 2] += dz
        return TriMesh(v, self.triangles.copy(), space=self.space,
                       truncation_lo=None if self.truncation_lo is None else self.truncation_lo + dz,
                       truncation_hi=None if self.truncation_hi is None else self.truncation_hi + dz,
                       name=self.name)


def _chain_loops(boundary_edges):
    nxt: dict[int, list[int]] = {}
    for a, b in boundary_edges:
        nxt.setdefault(a, []).append(b)
        nxt.setdefault(b, []).append(a)
    unused = {tuple(sorted(e)) for e in boundary_edges}
    loops = []
    while unused:
        a, b = unused.pop()
        loop = [a, b]
        while True:
            cur = loop[-1]
            prev = loop[-2]
            cands = [x for x in nxt.get(cur, []) if x != prev and tuple(sorted((cur, x))) in unused]
            if not cands:
                break
            x = cands[0]
            unused.discard(tuple(sorted((cur, x))))
            if x == loop[0]:
                break
            loop.append(x)
        loops.append(loop)
    return loops


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------

def write_mesh(mesh: TriMesh, path: str) -> None:
    path = str(path)
    if path.endswith(".obj"):
        _write_obj(mesh, path)
    elif path.endswith(".off"):
        _write_off(mesh, path)
    else:
        raise MeshError(f"unsupported mesh format for {path!r} (use .off or .obj)")


def read_mesh(path: str) -> TriMesh:
    path = str(path)
    if path.endswith(".obj"):
        return _read_obj(path)
    if path.endswith(".off"):
        return _read_off(path)
    raise MeshError(f"unsupported mesh format for {path!r} (use .off or .obj)")


def _header_lines(mesh: TriMesh):
    lines = []
    if mesh.space is not None:
        lines.append(f"# space: {mesh.space.space_id}")
    trunc = []
    if mesh.truncation_lo is not None:
        trunc.append(f"lo={mesh.truncation_lo:.12g}")
    if mesh.truncation_hi is not None:
        trunc.append(f"hi={mesh.truncation_hi:.12g}")
    if trunc:
        lines.append("# truncation: " + " ".join(trunc))
    return lines


def _parse_headers(lines):
    space = None
    lo = hi = None
    for ln in lines:
        body = ln.lstrip("#").strip()
        if body.startswith("space:"):
            space = parse_space(body[len("space:"):].strip())
        elif body.startswith("truncation:"):
            for tok in body[len("truncation:"):].split():
                k, v = tok.split("=")
                if k == "lo":
                    lo = float(v)
                elif k == "hi":
                    hi = float(v)
    return space, lo, hi


def _write_off(mesh, path):
    with open(path, "w") as fh:
        fh.write("OFF\n")
        for ln in _header_lines(mesh):
            fh.write(ln + "\n")
        fh.write(f"{len(mesh.vertices)} {len(mesh.triangles)} 0\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def _read_off(path):
    comments = []
    rows = []
    with open(path) as fh:
        first = fh.readline().strip()
        if first != "OFF":
            raise MeshError(f"{path!r} is not an OFF file")
        for ln in fh:
            s = ln.strip()
            if not s:
                continue
            if s.startswith("#"):
                comments.append(s)
                continue
            rows.append(s)
    if not rows:
        raise MeshError(f"{path!r}: missing OFF counts")
    nv, nf, _ = (int(x) for x in rows[0].split()[:3])
    if len(rows) < 1 + nv + nf:
        raise MeshError(f"{path!r}: truncated OFF data")
    verts = np.array([[float(x) for x in rows[1 + i].split()[:3]] for i in range(nv)])
    tris = []
    for i in range(nf):
        parts = rows[1 + nv + i].split()
        if int(parts[0]) != 3:
            raise MeshError("only triangle faces are supported")
        tris.append([int(parts[1]), int(parts[2]), int(parts[3])])
    space, lo, hi = _parse_headers(comments)
    return TriMesh(verts, np.array(tris, dtype=np.int64), space=space,
                   truncation_lo=lo, truncation_hi=hi)


def _write_obj(mesh, path):
    with open(path, "w") as fh:
        for ln in _header_lines(mesh):
            fh.write(ln + "\n")
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def _read_obj(path):
    comments = []
    verts = []
    tris = []
    with open(path) as fh:
        for ln in fh:
            s = ln.strip()
            if s.startswith("#"):
                comments.append(s)
            elif s.startswith("v "):
                verts.append([float(x) for x in s.split()[1:4]])
            elif s.startswith("f "):
                idx = [int(tok.split("/")[0]) - 1 for tok in s.split()[1:4]]
                tris.append(idx)
    space, lo, hi = _parse_headers(comments)
    return TriMesh(np.array(verts), np.array(tris, dtype=np.int64), space=space,
                   truncation_lo=lo, truncation_hi=hi)
