"""scikit-learn style front end.

:class:`TetrahedralField` treats a magnetized tetrahedral mesh as a fixed
model: ``fit`` validates the mesh and caches the face frames (the
geometry-only part of the work), ``predict`` returns H or B at query
points and ``transform`` returns the per-element tensors. For any other
magnetization ``M`` of shape (n_elements, 3),
``H = field_operator(X) @ M.ravel()``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .assembly import MU0
from .mesh import TetMesh, unit_scale


def check_points(X) -> np.ndarray:
    """Validate query points: a finite float array of shape (n, 3)."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 3:
        raise ValueError(f"expected points with 3 columns, got {X.shape[1]}")
    return X


class TetrahedralField(TransformerMixin, BaseEstimator):
    """Field of uniformly magnetized tetrahedra evaluated at query points.

    Parameters
    ----------
    vertices : array-like of shape (n_vertices, 3)
        Vertex coordinates in ``unit``.
    elements : array-like of shape (n_elements, 4)
        Vertex indices of each tetrahedron.
    magnetization : array-like of shape (n_elements, 3)
        Uniform magnetization of each element, A/m.
    unit : str or float, default="m"
        Length unit of ``vertices``; query points are always in meters.
    output : {"H", "B"}, default="H"
        Quantity returned by :meth:`predict`.
    """

    def __init__(self, vertices=None, elements=None, magnetization=None, unit="m", output="H"):
        self.vertices = vertices
        self.elements = elements
        self.magnetization = magnetization
        self.unit = unit
        self.output = output

    @classmethod
    def from_mesh(cls, mesh: TetMesh, output: str = "H") -> "TetrahedralField":
        return cls(mesh.vertices, mesh.elements, mesh.magnetization, unit="m", output=output)

    def fit(self, X=None, y=None):
        """Validate the mesh and cache face frames. ``X`` and ``y`` are ignored."""
        if self.output not in ("H", "B"):
            raise ValueError(f"output must be 'H' or 'B', got {self.output!r}")
        vertices = check_array(self.vertices, dtype=np.float64) * unit_scale(self.unit)
        elements = check_array(self.elements, dtype=np.int64)
        magnetization = check_array(self.magnetization, dtype=np.float64)
        self.mesh_ = TetMesh(vertices, elements, magnetization, unit=self.unit)
        self.mesh_.frames()
        self.n_features_in_ = 3
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "mesh_")
        X = check_points(X)
        H = self.mesh_.field(X)
        if self.output == "H":
            return H
        _, owner = self.mesh_.locate(X)
        M = np.where((owner >= 0)[:, None], self.mesh_.magnetization[np.maximum(owner, 0)], 0.0)
        return MU0 * (H + M)

    def transform(self, X) -> np.ndarray:
        """Per-element tensors flattened to shape (n_points, 9 * n_elements).

        Columns run element-major, then row, then column of each 3x3 tensor.
        """
        check_is_fitted(self, "mesh_")
        X = check_points(X)
        return self.mesh_.tensors(X).reshape(len(X), -1)

    def field_operator(self, X) -> np.ndarray:
        """Linear map from stacked magnetizations to H, shape (n, 3, 3 * n_elements)."""
        T = self.transform(X).reshape(len(X), -1, 3, 3)
        return T.transpose(0, 2, 1, 3).reshape(len(X), 3, -1)
