"""Discrete geodesic curvature of slice components in the base surface."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convexa import backend as _backend
from convexa.spaces import Surface2D
from convexa.sweep.slicing import Polyline, SliceCurve


@dataclass
class ComponentConvexity:
    min_curvature: float
    curvatures: np.ndarray
    closed: bool


def polyline_geodesic_curvature(points2d: np.ndarray, base: Surface2D) -> np.ndarray:
    """Per-vertex discrete geodesic curvature of a closed chart polyline:
    turning angle (with the incoming direction parallel-transported along its
    edge using the base Christoffel symbols) over the average edge length.

    The sign is canonicalized so that the total turning is positive."""
    pts = np.asarray(points2d, dtype=np.float64)
    n = len(pts)
    prev_ = np.roll(pts, 1, axis=0)
    next_ = np.roll(pts, -1, axis=0)
    u = pts - prev_
    w = next_ - pts
    mid = 0.5 * (prev_ + pts)
    kb = _backend.get_backend()
    gam_mid = kb.christoffel(base.code, base.params, mid)
    g_at = kb.metric(base.code, base.params, pts)
    g_mid = kb.metric(base.code, base.params, mid)
    ut = u - np.einsum("nkij,ni,nj->nk", gam_mid, u, u)
    dot = np.einsum("nij,ni,nj->n", g_at, ut, w)
    det = np.sqrt(np.linalg.det(g_at)) * (ut[:, 0] * w[:, 1] - ut[:, 1] * w[:, 0])
    ang = np.arctan2(det, dot)
    lu = np.sqrt(np.einsum("nij,ni,nj->n", g_mid, u, u))
    lw = np.sqrt(np.einsum("nij,ni,nj->n", g_at, w, w))
    ks = ang / (0.5 * (lu + lw))
    if ks.sum() < 0:
        ks = -ks
    return ks


def slice_convexity(slice_curve: SliceCurve, base: Surface2D) -> list[ComponentConvexity]:
    """Per-component minimum geodesic curvature; open components are
    reported with NaN and skipped."""
    out = []
    for comp in slice_curve.components:
        if not comp.closed or len(comp) < 4:
            out.append(ComponentConvexity(np.nan, np.array([]), closed=False))
            continue
        ks = polyline_geodesic_curvature(comp.base(), base)
        out.append(ComponentConvexity(float(ks.min()), ks, closed=True))
    return out
