"""Triangle and tetrahedron geometry: vertex ordering, outward orientation,
canonical face frames and point classification.

Every face is mapped onto a local frame in which it lies in the ``z = 0``
plane with vertices ``A' = (l, 0, 0)``, ``B' = (0, h, 0)`` and
``C' = (-k, 0, 0)``. ``B`` is always the vertex with the largest interior
angle, which places the foot of its altitude strictly inside ``CA`` and
therefore keeps ``h``, ``k`` and ``l`` positive.

The public functions work on single triangles and return small frozen
dataclasses. The underscored ``_batch_*`` helpers do the same work on
stacked arrays of shape ``(n, 3)`` and back the vectorised evaluation path.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

#: Relative tolerance used for degeneracy rejection and angle ties.
GEOMETRY_RTOL = 1e-12


class GeometryError(ValueError):
    """Raised for collinear triangles and coplanar tetrahedra."""


class DegenerateFaceError(GeometryError):
    """Raised when a face decomposes into a right triangle of zero extent."""


class Containment(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"

    def __str__(self) -> str:
        return self.value


def as_vec3(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite components")
    return v


@dataclass(frozen=True)
class OrderedTriangle:
    """Triangle whose middle vertex ``B`` carries the largest interior angle."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def normal(self) -> np.ndarray:
        n = np.cross(self.A - self.C, self.B - self.C)
        return n / np.linalg.norm(n)

    @property
    def area(self) -> float:
        return 0.5 * float(np.linalg.norm(np.cross(self.A - self.C, self.B - self.C)))


@dataclass(frozen=True)
class FacePose:
    """Local-to-global rotation ``P`` (columns e_x, e_y, e_z) and origin ``D``."""

    P: np.ndarray
    D: np.ndarray

    def to_local(self, r) -> np.ndarray:
        """Map global points (``(3,)`` or ``(n, 3)``) into the face frame."""
        return (np.asarray(r, dtype=float) - self.D) @ self.P

    def to_global(self, r_local) -> np.ndarray:
        return np.asarray(r_local, dtype=float) @ self.P.T + self.D


@dataclass(frozen=True)
class RightTriangleParams:
    """Local-frame legs; scalars, or equal-shape arrays for batched evaluation."""

    h: float
    k: float
    l: float

    def __post_init__(self):
        for name in ("h", "k", "l"):
            value = np.asarray(getattr(self, name))
            if not np.all(np.isfinite(value) & (value > 0)):
                raise DegenerateFaceError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def scale(self):
        return np.maximum(np.maximum(self.h, self.k), self.l)


@dataclass(frozen=True)
class Tetrahedron:
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    v4: np.ndarray

    def __post_init__(self):
        for name in ("v1", "v2", "v3", "v4"):
            object.__setattr__(self, name, as_vec3(getattr(self, name), name))
        edge = self.longest_edge
        if abs(self.signed_volume) < GEOMETRY_RTOL * edge**3:
            raise GeometryError("tetrahedron vertices are coplanar")

    @classmethod
    def from_array(cls, vertices) -> "Tetrahedron":
        v = np.asarray(vertices, dtype=float)
        if v.shape != (4, 3):
            raise ValueError(f"expected (4, 3) vertex array, got {v.shape}")
        return cls(*v)

    @property
    def vertices(self) -> np.ndarray:
        return np.stack([self.v1, self.v2, self.v3, self.v4])

    @property
    def signed_volume(self) -> float:
        return float(np.dot(np.cross(self.v1 - self.v4, self.v2 - self.v4), self.v3 - self.v4)) / 6.0

    @property
    def volume(self) -> float:
        return abs(self.signed_volume)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def longest_edge(self) -> float:
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    @property
    def circumradius(self) -> float:
        v = self.vertices
        a = 2.0 * (v[1:] - v[0])
        b = (v[1:] ** 2).sum(1) - (v[0] ** 2).sum()
        center = np.linalg.solve(a, b)
        return float(np.linalg.norm(v[0] - center))

    def faces(self):
        """The four faces as ``(face_vertices, opposite_vertex)`` pairs.

        Enumeration is fixed: (v1 v2 v3 | v4), (v4 v1 v2 | v3),
        (v3 v4 v1 | v2), (v2 v3 v4 | v1).
        """
        v1, v2, v3, v4 = self.v1, self.v2, self.v3, self.v4
        return (
            ((v1, v2, v3), v4),
            ((v4, v1, v2), v3),
            ((v3, v4, v1), v2),
            ((v2, v3, v4), v1),
        )


def _interior_angles(a, b, c):
    """Interior angles at a, b, c for stacked triangles, shape (n, 3)."""

    def angle(p, q, r):
        u, w = q - p, r - p
        return np.arctan2(np.linalg.norm(np.cross(u, w), axis=-1), (u * w).sum(-1))

    return np.stack([angle(a, b, c), angle(b, c, a), angle(c, a, b)], axis=-1)


def _check_non_collinear(a, b, c):
    edges = np.stack(
        [np.linalg.norm(b - a, axis=-1), np.linalg.norm(c - b, axis=-1), np.linalg.norm(a - c, axis=-1)],
        axis=-1,
    )
    longest = edges.max(-1)
    twice_area = np.linalg.norm(np.cross(a - c, b - c), axis=-1)
    # min altitude = 2 * area / longest edge
    bad = ~(twice_area > GEOMETRY_RTOL * longest**2)
    if np.any(bad):
        raise GeometryError("triangle vertices are collinear")


def _batch_order_largest_angle(a, b, c):
    """Cyclically relabel stacked triangles so the largest angle sits at B.

    Cyclic relabelling keeps ``(A - C) x (B - C)`` unchanged, so the face
    orientation survives the reordering.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    _check_non_collinear(a, b, c)
    angles = _interior_angles(a, b, c)
    # ties within GEOMETRY_RTOL rad go to the lowest original index
    is_max = angles >= angles.max(-1, keepdims=True) - GEOMETRY_RTOL
    idx = np.argmax(is_max, axis=-1)[..., None]
    A = np.where(idx == 0, c, np.where(idx == 1, a, b))
    B = np.where(idx == 0, a, np.where(idx == 1, b, c))
    C = np.where(idx == 0, b, np.where(idx == 1, c, a))
    return A, B, C


def order_largest_angle(a, b, c) -> OrderedTriangle:
    """Relabel ``(a, b, c)`` so the vertex with the largest angle is ``B``.

    The relabelling is a cyclic shift, so the orientation of the triple is
    preserved. Ties within 1e-12 rad are broken towards the lowest original
    index.

    Raises
    ------
    GeometryError
        If the vertices are collinear.
    """
    a, b, c = as_vec3(a, "a"), as_vec3(b, "b"), as_vec3(c, "c")
    A, B, C = _batch_order_largest_angle(a[None], b[None], c[None])
    return OrderedTriangle(A[0], B[0], C[0])


def _batch_face_basis(A, B, C):
    """Frames for stacked ordered triangles.

    Returns ``P`` of shape (n, 3, 3), ``D`` of shape (n, 3) and ``hkl`` of
    shape (n, 3).
    """
    ca = A - C
    cb = B - C
    len_ca2 = (ca * ca).sum(-1)
    len_ca = np.sqrt(len_ca2)
    ex = ca / len_ca[..., None]
    ez = np.cross(ca, cb)
    ez = ez / np.linalg.norm(ez, axis=-1)[..., None]
    ey = np.cross(ez, ex)
    P = np.stack([ex, ey, ez], axis=-1)
    # foot of the altitude from B, law-of-cosines form
    len_cb2 = (cb * cb).sum(-1)
    len_ab2 = ((B - A) ** 2).sum(-1)
    t = (len_ca2 + len_cb2 - len_ab2) / (2.0 * len_ca2)
    D = C + ca * t[..., None]
    l = len_ca * (1.0 - t)
    k = len_ca * t
    h = ((B - D) * ey).sum(-1)
    return P, D, np.stack([h, k, l], axis=-1)


def face_basis(t: OrderedTriangle) -> FacePose:
    """Local frame of an ordered triangle.

    ``e_x`` points along ``A - C``, ``e_z`` along ``(A - C) x (B - C)`` and
    ``e_y = e_z x e_x``. ``D`` is the foot of the altitude from ``B`` onto
    line ``CA``. The returned ``P`` is a proper rotation.
    """
    _check_non_collinear(t.A, t.B, t.C)
    P, D, _ = _batch_face_basis(t.A[None], t.B[None], t.C[None])
    return FacePose(P[0], D[0])


def right_triangle_params(pose: FacePose, t: OrderedTriangle) -> RightTriangleParams:
    """Read ``h``, ``k``, ``l`` off the local images of ``B``, ``C`` and ``A``.

    Raises
    ------
    DegenerateFaceError
        If any of the three lengths falls below 1e-12 of the longest edge.
    """
    A_loc, B_loc, C_loc = pose.to_local(np.stack([t.A, t.B, t.C]))
    h, k, l = B_loc[1], -C_loc[0], A_loc[0]
    tol = GEOMETRY_RTOL * max(
        np.linalg.norm(t.A - t.B), np.linalg.norm(t.B - t.C), np.linalg.norm(t.C - t.A)
    )
    if min(h, k, l) <= tol:
        raise DegenerateFaceError(f"degenerate right-triangle split: h={h}, k={k}, l={l}")
    return RightTriangleParams(float(h), float(k), float(l))


def _orientation(va, vb, vc, opposite):
    return (np.cross(va - vc, vb - vc) * (opposite - vc)).sum(-1)


def orient_outward(face, opposite):
    """Return the face triple with its normal pointing away from ``opposite``.

    The normal of ``(va, vb, vc)`` is ``(va - vc) x (vb - vc)``; when it
    points towards the opposite vertex ``va`` and ``vc`` are swapped.
    """
    va, vb, vc = (as_vec3(v) for v in face)
    opposite = as_vec3(opposite, "opposite")
    s = _orientation(va, vb, vc, opposite)
    scale = max(np.linalg.norm(p - q) for p, q in ((va, vb), (vb, vc), (vc, va), (va, opposite), (vb, opposite), (vc, opposite)))
    if abs(s) < 6.0 * GEOMETRY_RTOL * scale**3:
        raise GeometryError("face and opposite vertex are coplanar")
    if s > 0:
        return vc, vb, va
    return va, vb, vc


def outward_faces(tet: Tetrahedron):
    """Outward-oriented, largest-angle-ordered faces of ``tet``."""
    return [order_largest_angle(*orient_outward(face, opp)) for face, opp in tet.faces()]


def _batch_outward_faces(verts):
    """Outward ordered faces for stacked tetrahedra ``verts`` of shape (n, 4, 3).

    Returns a list of four ``(A, B, C)`` tuples of (n, 3) arrays.
    """
    v1, v2, v3, v4 = (verts[:, i] for i in range(4))
    out = []
    for (va, vb, vc), opp in (((v1, v2, v3), v4), ((v4, v1, v2), v3), ((v3, v4, v1), v2), ((v2, v3, v4), v1)):
        flip = (_orientation(va, vb, vc, opp) > 0)[:, None]
        va, vc = np.where(flip, vc, va), np.where(flip, va, vc)
        out.append(_batch_order_largest_angle(va, vb, vc))
    return out


def _signed_face_distances(verts, r):
    """Signed distances from ``r`` to the four face planes, positive inside.

    ``verts`` is (4, 3), ``r`` is (n, 3); returns (n, 4).
    """
    out = []
    for i in range(4):
        face = np.delete(verts, i, axis=0)
        n = np.cross(face[1] - face[0], face[2] - face[0])
        n = n / np.linalg.norm(n)
        if np.dot(n, verts[i] - face[0]) < 0:
            n = -n
        out.append((r - face[0]) @ n)
    return np.stack(out, axis=-1)


def _containment_table():
    table = np.empty(3, dtype=object)
    for i, c in enumerate((Containment.INSIDE, Containment.BOUNDARY, Containment.OUTSIDE)):
        table[i] = c
    return table


_CONTAINMENT = _containment_table()


#: Integer codes returned by :func:`containment_codes`, ordered by precedence.
CODE_INSIDE, CODE_BOUNDARY, CODE_OUTSIDE = 0, 1, 2


def containment_codes(tet: Tetrahedron, r) -> np.ndarray:
    """Integer classification of points ``r`` (n, 3): 0 inside, 1 boundary, 2 outside.

    Use these rather than comparing object arrays of :class:`Containment`,
    which numpy does not compare elementwise against an enum member.
    """
    r = np.atleast_2d(np.asarray(r, dtype=float))
    d = _signed_face_distances(tet.vertices, r)
    tol = GEOMETRY_RTOL * tet.longest_edge
    dmin = d.min(-1)
    return np.where(dmin < -tol, CODE_OUTSIDE, np.where(dmin <= tol, CODE_BOUNDARY, CODE_INSIDE))


def classify_points(tet: Tetrahedron, r) -> np.ndarray:
    """Vectorised :func:`contains`; returns an object array of Containment."""
    return _CONTAINMENT[containment_codes(tet, r)]


def contains(tet: Tetrahedron, r) -> Containment:
    """Classify a single point as inside, outside or on the boundary of ``tet``."""
    return classify_points(tet, as_vec3(r, "r"))[0]
