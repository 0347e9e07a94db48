"""Analytical demagnetization tensor field of triangular faces and tetrahedra."""

__version__ = "0.1.0"

from .assembly import (
    MU0,
    MagnetizedTetrahedron,
    b_field,
    tet_field,
    tet_tensor,
    triangle_field,
    triangle_tensor,
)
from .estimator import TetrahedralField
from .geometry import Containment, GeometryError, Tetrahedron, contains
from .mesh import EvalSet, TetMesh, evaluate, load_mesh

__all__ = [
    "MU0",
    "Containment",
    "EvalSet",
    "GeometryError",
    "MagnetizedTetrahedron",
    "TetMesh",
    "Tetrahedron",
    "TetrahedralField",
    "b_field",
    "contains",
    "evaluate",
    "load_mesh",
    "tet_field",
    "tet_tensor",
    "triangle_field",
    "triangle_tensor",
]
