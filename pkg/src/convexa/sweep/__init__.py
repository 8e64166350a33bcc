from convexa.sweep.classify import SweepResult, classify, sweep_frame
from convexa.sweep.convexity import polyline_geodesic_curvature, slice_convexity
from convexa.sweep.fixtures import FIXTURES, make_fixture, mesh_from_surface
from convexa.sweep.graphs import alexandrov_bigraph, killing_graph_check
from convexa.sweep.intersect import self_intersect, tri_tri_exact
from convexa.sweep.mesh import MeshError, TriMesh, read_mesh, write_mesh
from convexa.sweep.slicing import Polyline, SliceCurve, slice_mesh
from convexa.sweep.tracking import SweepEvent, TrackingAmbiguity, track_components

__all__ = [
    "SweepResult", "classify", "sweep_frame",
    "polyline_geodesic_curvature", "slice_convexity",
    "FIXTURES", "make_fixture", "mesh_from_surface",
    "alexandrov_bigraph", "killing_graph_check",
    "self_intersect", "tri_tri_exact",
    "MeshError", "TriMesh", "read_mesh", "write_mesh",
    "Polyline", "SliceCurve", "slice_mesh",
    "SweepEvent", "TrackingAmbiguity", "track_components",
]
