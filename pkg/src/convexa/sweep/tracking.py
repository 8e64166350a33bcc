"""Component lifecycle tracking across sweep levels.

Components of consecutive slices are matched by proximity of their base
footprints (point sets in slice-plane coordinates). Unmatched birth/death
and one-to-many merge/split events are emitted with +-dt localization;
entangled many-to-many matchings raise TrackingAmbiguity, which the
classifier converts into an Undetermined verdict rather than guessing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convexa.sweep.mesh import MeshError, TriMesh
from convexa.sweep.slicing import slice_mesh


class TrackingAmbiguity(MeshError):
    pass


@dataclass(frozen=True)
class SweepEvent:
    t: float
    kind: str      # birth | death | merge | split | enters-window | exits-window
    detail: str = ""

    def sort_key(self):
        return (self.t, self.kind, self.detail)


@dataclass
class TrackResult:
    events: list
    levels: np.ndarray
    counts: list
    open_counts: list

    def of_kind(self, kind: str):
        return [e for e in self.events if e.kind == kind]


def _footprint(poly, projector):
    pts = projector(poly.points)
    if len(pts) > 64:
        idx = np.linspace(0, len(pts) - 1, 64).astype(int)
        pts = pts[idx]
    return pts


def _setdist(a, b) -> float:
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(d.min())


def track_components(mesh: TriMesh, t_min: float, t_max: float, dt: float,
                     values: np.ndarray | None = None,
                     projector=None,
                     match_radius: float | None = None) -> TrackResult:
    if dt <= 0:
        raise MeshError("dt must be positive")
    if projector is None:
        projector = lambda pts: pts[:, :2]
    feature = mesh.feature_size()
    if match_radius is None:
        match_radius = max(4.0 * dt, 4.0 * feature)
    levels = np.arange(t_min, t_max + dt * 0.5, dt)
    events: list[SweepEvent] = []
    counts = []
    open_counts = []
    prev_feet: list[np.ndarray] = []
    prev_level = None
    for k, lv in enumerate(levels):
        sl = slice_mesh(mesh, lv, values=values)
        feet = [_footprint(c, projector) for c in sl.components]
        counts.append(len([c for c in sl.components if c.closed]))
        open_counts.append(len([c for c in sl.components if not c.closed]))
        if k == 0:
            for _ in feet:
                events.append(SweepEvent(float(lv), "enters-window"))
        else:
            tmid = float(0.5 * (prev_level + lv))
            match_pc = [[] for _ in prev_feet]   # prev -> list of cur
            match_cp = [[] for _ in feet]        # cur -> list of prev
            for i, fa in enumerate(prev_feet):
                for j, fb in enumerate(feet):
                    if _setdist(fa, fb) < match_radius:
                        match_pc[i].append(j)
                        match_cp[j].append(i)
            for j, srcs in enumerate(match_cp):
                if len(srcs) >= 2 and any(len(match_pc[i]) >= 2 for i in srcs):
                    raise TrackingAmbiguity(
                        f"entangled component matching at level {lv:.6g}")
            for i, dsts in enumerate(match_pc):
                if not dsts:
                    events.append(SweepEvent(tmid, "death"))
                elif len(dsts) >= 2:
                    events.append(SweepEvent(tmid, "split", f"into {len(dsts)}"))
            for j, srcs in enumerate(match_cp):
                if not srcs:
                    events.append(SweepEvent(tmid, "birth"))
                elif len(srcs) >= 2:
                    events.append(SweepEvent(tmid, "merge", f"from {len(srcs)}"))
        prev_feet = feet
        prev_level = lv
    for _ in prev_feet:
        events.append(SweepEvent(float(levels[-1]), "exits-window"))
    events.sort(key=lambda e: e.sort_key())
    return TrackResult(events=events, levels=levels, counts=counts, open_counts=open_counts)
