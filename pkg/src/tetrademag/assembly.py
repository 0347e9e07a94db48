"""Global-frame tensor and field of triangular faces and tetrahedra.

A face contributes the rank-one tensor ``P N' P^T``. Because only the third
column of the local tensor ``N'`` is populated, this reduces to
``outer(P @ n', e_z)``: the field of a face is ``(P @ n') * (e_z . M)``.
The geometry (``P``, ``D``, ``h``, ``k``, ``l``) depends only on the vertices
and can be computed once per tetrahedron and reused for any number of
evaluation points and magnetizations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    CODE_OUTSIDE,
    Tetrahedron,
    _batch_face_basis,
    _batch_order_largest_angle,
    _batch_outward_faces,
    as_vec3,
    containment_codes,
)
from .tensor_core import _local_tensor_arrays, guard_z

#: Vacuum permeability in T m / A.
MU0 = 4e-7 * np.pi


@dataclass(frozen=True)
class MagnetizedTetrahedron:
    tet: Tetrahedron
    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", as_vec3(self.m, "magnetization"))


@dataclass(frozen=True)
class FaceFrames:
    """Cached frames of one or more faces.

    ``P`` has shape (..., 3, 3), ``D`` and ``hkl`` shape (..., 3).
    """

    P: np.ndarray
    D: np.ndarray
    hkl: np.ndarray

    @property
    def normal(self) -> np.ndarray:
        return self.P[..., :, 2]


def triangle_frames(a, b, c) -> FaceFrames:
    """Frame of a triangle, oriented by the right-hand rule on ``a -> b -> c``."""
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    A, B, C = _batch_order_largest_angle(a[None], b[None], c[None])
    P, D, hkl = _batch_face_basis(A, B, C)
    return FaceFrames(P[0], D[0], hkl[0])


def tet_frames(tet: Tetrahedron) -> FaceFrames:
    """Outward face frames of ``tet``, stacked along a leading axis of length 4."""
    return batch_tet_frames(tet.vertices[None])._index(0)


@dataclass(frozen=True)
class BatchTetFrames(FaceFrames):
    """Face frames for ``n`` tetrahedra; arrays carry leading axes (n, 4)."""

    def _index(self, i) -> FaceFrames:
        return FaceFrames(self.P[i], self.D[i], self.hkl[i])


def batch_tet_frames(verts) -> BatchTetFrames:
    """Outward face frames for stacked tetrahedra of shape (n, 4, 3)."""
    verts = np.asarray(verts, dtype=float)
    faces = _batch_outward_faces(verts)
    parts = [_batch_face_basis(*abc) for abc in faces]
    P = np.stack([p[0] for p in parts], axis=1)
    D = np.stack([p[1] for p in parts], axis=1)
    hkl = np.stack([p[2] for p in parts], axis=1)
    return BatchTetFrames(P, D, hkl)


def _face_column(P, D, hkl, r):
    """``P @ n'(P^T (r - D))`` with broadcasting over leading axes."""
    loc = np.einsum("...j,...jk->...k", r - D, P)
    scale = hkl.max(-1)
    z = guard_z(loc[..., 2], scale)
    cols = _local_tensor_arrays(loc[..., 0], loc[..., 1], z, hkl[..., 0], hkl[..., 1], hkl[..., 2])
    return np.einsum("...ij,...j->...i", P, np.stack(cols, axis=-1))


def _face_tensor(P, D, hkl, r):
    return _face_column(P, D, hkl, r)[..., :, None] * P[..., None, :, 2]


def _columns(frames: FaceFrames, r):
    """Per-face ``P @ n'`` at points ``r`` (n, 3) for an unbatched face stack; (n, 3, faces)."""
    P = frames.P.reshape(-1, 3, 3)
    D = frames.D.reshape(-1, 3)
    hkl = frames.hkl.reshape(-1, 3)
    out = np.empty(r.shape[:-1] + (3, len(P)))
    for f in range(len(P)):
        h, k, l = hkl[f]
        loc = (r - D[f]) @ P[f]
        z = guard_z(loc[..., 2], max(h, k, l))
        cols = np.stack(_local_tensor_arrays(loc[..., 0], loc[..., 1], z, h, k, l), axis=-1)
        out[..., f] = cols @ P[f].T
    return out


def frames_tensor(frames: FaceFrames, r) -> np.ndarray:
    """Tensor summed over the faces in ``frames`` (leading axis) at points ``r``.

    ``r`` may be ``(3,)`` or ``(n, 3)``; the result is ``(3, 3)`` or ``(n, 3, 3)``.
    """
    r = np.asarray(r, dtype=float)
    normals = frames.P.reshape(-1, 3, 3)[:, :, 2]
    return _columns(frames, r) @ normals


def frames_field(frames: FaceFrames, m, r) -> np.ndarray:
    """Field ``sum_faces N_face(r) @ m`` without forming the 3x3 tensors."""
    r = np.asarray(r, dtype=float)
    charge = frames.P.reshape(-1, 3, 3)[:, :, 2] @ np.asarray(m, dtype=float)
    return _columns(frames, r) @ charge


def triangle_tensor(a, b, c, r) -> np.ndarray:
    """Global tensor of the uniformly magnetized face ``(a, b, c)`` at ``r``.

    The face normal is ``(a - c) x (b - c)``; ``H_face(r) = N @ M``.

    Raises
    ------
    GeometryError
        If the vertices are collinear.
    """
    return frames_tensor(triangle_frames(a, b, c), r)


def triangle_field(a, b, c, m, r) -> np.ndarray:
    return frames_field(triangle_frames(a, b, c), as_vec3(m, "m"), r)


def tet_tensor(tet: Tetrahedron, r) -> np.ndarray:
    """Tensor field of a tetrahedron at ``r``; ``H = N @ M``.

    Inside the body the trace is -1, outside it is 0.
    """
    return frames_tensor(tet_frames(tet), r)


def tet_field(mt: MagnetizedTetrahedron, r) -> np.ndarray:
    """H-field (same units as ``mt.m``) of a uniformly magnetized tetrahedron."""
    return frames_field(tet_frames(mt.tet), mt.m, r)


def b_field(mt: MagnetizedTetrahedron, r) -> np.ndarray:
    """Flux density ``mu0 (H + M)`` inside, ``mu0 H`` outside, in tesla.

    Boundary points take the inside branch.
    """
    r = np.asarray(r, dtype=float)
    H = tet_field(mt, r)
    where = containment_codes(mt.tet, r.reshape(-1, 3)).reshape(r.shape[:-1])
    owned = (where != CODE_OUTSIDE)[..., None]
    return MU0 * (H + np.where(owned, mt.m, 0.0))


def batch_tet_tensor(frames: BatchTetFrames, r) -> np.ndarray:
    """Tensor of tetrahedron ``i`` at point ``r[i]``; ``r`` has shape (n, 3)."""
    r = np.asarray(r, dtype=float)
    return _face_tensor(frames.P, frames.D, frames.hkl, r[:, None, :]).sum(axis=1)
