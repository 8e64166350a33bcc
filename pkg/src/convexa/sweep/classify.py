"""Sweep classification of triangulated immersed surfaces.

The sweep runs a foliation functional through the mesh (horizontal levels in
product spaces; signed distance to a base line for Heisenberg meshes, whose
vertical-plane foliation is affine over the flat base), tracks component
lifecycle events, and applies the decision table:

Sphere        closed mesh, single birth + single death, no merge/split,
              no self-intersections, Euler characteristic 2
PlaneTopEnd   one truncation boundary at the top, single birth, no death
PlaneBottomEnd  mirrored
NonEmbedded   any self-intersecting triangle pair
Undetermined  ambiguous tracking, interior boundary, or mixed signals
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from convexa.spaces import AmbientSpace, Heisenberg, ProductSpace
from convexa.sweep.convexity import slice_convexity
from convexa.sweep.intersect import self_intersect
from convexa.sweep.mesh import MeshError, TriMesh
from convexa.sweep.slicing import slice_mesh
from convexa.sweep.tracking import SweepEvent, TrackingAmbiguity, track_components

VERDICTS = ("Sphere", "PlaneTopEnd", "PlaneBottomEnd", "NonEmbedded", "Undetermined")


@dataclass
class SweepResult:
    verdict: str
    events: list
    diagnostics: dict = field(default_factory=dict)

    def event_counts(self) -> dict:
        out: dict[str, int] = {}
        for e in self.events:
            out[e.kind] = out.get(e.kind, 0) + 1
        return out


def sweep_frame(mesh: TriMesh, space: AmbientSpace, direction: float = 0.0):
    """(functional values, slice-plane projector) for the space's sweep."""
    if isinstance(space, Heisenberg):
        c, s = np.cos(direction), np.sin(direction)
        vals = c * mesh.vertices[:, 0] + s * mesh.vertices[:, 1]
        projector = lambda pts: np.stack(
            [-s * pts[:, 0] + c * pts[:, 1], pts[:, 2]], axis=1)
        return vals, projector
    vals = mesh.heights()
    return vals, (lambda pts: pts[:, :2])


def classify(mesh: TriMesh, space: AmbientSpace | None = None,
             dt: float | None = None, direction: float = 0.0,
             check_convexity: bool = False) -> SweepResult:
    """Run the full sweep classification."""
    space = space or mesh.space
    if space is None:
        raise MeshError("mesh has no bound space; pass one or add a '# space:' header")
    if not isinstance(space, (ProductSpace, Heisenberg)):
        raise MeshError(f"sweep classification needs a product space or Heisenberg, got {space.space_id}")
    info = mesh.validate()
    diagnostics: dict = {"euler": info.euler, "n_boundary_loops": len(info.boundary_loops)}

    vals, projector = sweep_frame(mesh, space, direction)
    vmin, vmax = float(vals.min()), float(vals.max())
    span = max(vmax - vmin, 1e-12)
    if dt is None:
        dt = span / 80.0
    diagnostics["dt"] = dt

    pairs = self_intersect(mesh)
    events: list[SweepEvent] = []
    if pairs:
        tc = mesh.corners()
        for i, j in pairs[:200]:
            t = float(0.5 * (vals[mesh.triangles[i]].mean() + vals[mesh.triangles[j]].mean()))
            events.append(SweepEvent(t, "self-intersection", f"triangles {i},{j}"))
        events.sort(key=lambda e: e.sort_key())
        diagnostics["intersecting_pairs"] = len(pairs)
        return SweepResult("NonEmbedded", events, diagnostics)

    # boundary loops must sit at a truncation height
    trunc_top = trunc_bottom = 0
    tol = max(3.0 * mesh.feature_size(), 1e-9 * span)
    for loop in info.boundary_loops:
        hv = vals[np.array(loop)]
        target_hi = mesh.truncation_hi if mesh.truncation_hi is not None else vmax
        target_lo = mesh.truncation_lo if mesh.truncation_lo is not None else vmin
        if np.all(np.abs(hv - target_hi) < tol):
            trunc_top += 1
        elif np.all(np.abs(hv - target_lo) < tol):
            trunc_bottom += 1
        else:
            diagnostics["interior_boundary"] = True
            return SweepResult("Undetermined", events, diagnostics)
    diagnostics["truncation_boundaries"] = {"top": trunc_top, "bottom": trunc_bottom}

    lo = vmin - dt if trunc_bottom == 0 else vmin + 1.5 * dt
    hi = vmax + dt if trunc_top == 0 else vmax - 1.5 * dt
    try:
        track = track_components(mesh, lo, hi, dt, values=vals, projector=projector)
    except TrackingAmbiguity as exc:
        diagnostics["tracking"] = str(exc)
        return SweepResult("Undetermined", events, diagnostics)
    events = sorted(events + track.events, key=lambda e: e.sort_key())
    counts = {}
    for e in track.events:
        counts[e.kind] = counts.get(e.kind, 0) + 1
    diagnostics["event_counts"] = counts

    if check_convexity and isinstance(space, ProductSpace):
        for lv in track.levels[:: max(1, len(track.levels) // 16)]:
            sl = slice_mesh(mesh, lv, values=vals)
            for comp in slice_convexity(sl, space.base):
                if comp.closed and comp.min_curvature <= 0:
                    events.append(SweepEvent(float(lv), "convexity-failure",
                                             f"min k_g = {comp.min_curvature:.4g}"))
        events.sort(key=lambda e: e.sort_key())

    births = counts.get("birth", 0)
    deaths = counts.get("death", 0)
    ms = counts.get("merge", 0) + counts.get("split", 0)
    enters = counts.get("enters-window", 0)
    exits = counts.get("exits-window", 0)

    if info.closed:
        if births == 1 and deaths == 1 and ms == 0 and enters == 0 and exits == 0 \
                and info.euler == 2:
            return SweepResult("Sphere", events, diagnostics)
        diagnostics["reason"] = "closed mesh but sphere signature not met"
        return SweepResult("Undetermined", events, diagnostics)
    if trunc_top >= 1 and trunc_bottom == 0:
        if births == 1 and deaths == 0 and ms == 0 and enters == 0 and exits >= 1:
            return SweepResult("PlaneTopEnd", events, diagnostics)
    if trunc_bottom >= 1 and trunc_top == 0:
        if deaths == 1 and births == 0 and ms == 0 and exits == 0 and enters >= 1:
            return SweepResult("PlaneBottomEnd", events, diagnostics)
    diagnostics["reason"] = "no decision rule matched"
    return SweepResult("Undetermined", events, diagnostics)
