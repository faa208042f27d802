"""hyperslice: represent 4D (and t-extruded 5D) objects as pure simplicial
3-complexes of tetrahedra, intersect them with a positioned 3-flat, and
explore the resulting closed triangle meshes via CLI, files, or the
interactive slice service."""

from .generators import (ExtrudeParams, SphereParams, TorusParams,
                         extrude_along_t, make_3sphere, make_3torus,
                         project_to_3sphere, tessellate_cell,
                         three_torus_point)
from .ndvec import (ActiveAxes, Hyperplane3Flat, PlanePose, VecN, axis_plane,
                    blend, dot5, hyperplane_from_points, pose_to_hyperplane,
                    rotate_in_plane)
from .projector import ViewSpec, project, standard_viewports
from .simplicial import (Complex3, Tetrahedron, TriMesh, VertexPool,
                         face_incidence, mesh_topology, validate_closed)
from .slicer import (SliceRequest, intersect_edge, slice_complex, slice_tet,
                     triangle_normal_and_frame)

__version__ = "0.1.0"

__all__ = [
    "ActiveAxes", "Complex3", "ExtrudeParams", "Hyperplane3Flat",
    "PlanePose", "SliceRequest", "SphereParams", "Tetrahedron",
    "TorusParams", "TriMesh", "VecN", "VertexPool", "ViewSpec",
    "axis_plane", "blend", "dot5", "extrude_along_t", "face_incidence",
    "hyperplane_from_points", "intersect_edge", "make_3sphere",
    "make_3torus", "mesh_topology", "pose_to_hyperplane", "project",
    "project_to_3sphere", "rotate_in_plane", "slice_complex", "slice_tet",
    "standard_viewports", "tessellate_cell", "three_torus_point",
    "triangle_normal_and_frame", "validate_closed",
]
