"""Brute-force references for the closed-form fields.

The surface integrals of a uniformly charged triangle are evaluated by
adaptive 4-way subdivision with a 7-point degree-5 symmetric rule on every
leaf. Each leaf is compared against the sum over its four children and the
difference drives both refinement and a Richardson correction. The kernels
are integrated directly in global coordinates, with the face normal taken
from the raw vertex order, so nothing is shared with the analytic path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SQ15 = np.sqrt(15.0)
_A1, _B1 = (6.0 - _SQ15) / 21.0, (9.0 + 2.0 * _SQ15) / 21.0
_A2, _B2 = (6.0 + _SQ15) / 21.0, (9.0 - 2.0 * _SQ15) / 21.0
_W1, _W2 = (155.0 - _SQ15) / 1200.0, (155.0 + _SQ15) / 1200.0

#: Barycentric nodes (7, 3) and weights (7,) of Radon's degree-5 rule.
RULE_NODES = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_A1, _A1, _B1],
        [_A1, _B1, _A1],
        [_B1, _A1, _A1],
        [_A2, _A2, _B2],
        [_A2, _B2, _A2],
        [_B2, _A2, _A2],
    ]
)
RULE_WEIGHTS = np.array([9 / 40, _W1, _W1, _W1, _W2, _W2, _W2])
_RULE_ORDER = 6  # error of a degree-5 rule scales as size**6


class OracleError(RuntimeError):
    """Quadrature failed to converge, or was asked to integrate through its sheet."""


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-15
    max_subdivisions: int = 500_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


def rule_on_triangles(func, tris):
    """Apply the leaf rule to stacked triangles ``tris`` of shape (n, 3, 3).

    ``func`` maps points (n, 7, 3) to values (n, 7, ...).
    """
    pts = np.matmul(RULE_NODES, tris)
    area = 0.5 * np.linalg.norm(np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=-1)
    vals = func(pts)
    return np.tensordot(vals, RULE_WEIGHTS, axes=([1], [0])) * area.reshape((-1,) + (1,) * (vals.ndim - 2))


def _children(tris):
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    kids = np.stack(
        [
            np.stack([a, ab, ca], 1),
            np.stack([ab, b, bc], 1),
            np.stack([ca, bc, c], 1),
            np.stack([ab, bc, ca], 1),
        ],
        axis=1,
    )
    return kids.reshape(-1, 3, 3)


def adaptive_triangle_integral(func, triangle, spec: QuadratureSpec = QuadratureSpec()):
    """Integrate ``func`` over a triangle (3, 3) to ``spec`` tolerances.

    Globally adaptive: every leaf carries the difference between its own
    rule and the sum over its children as an error estimate, and the leaves
    with the largest estimates are split until the summed estimate is below
    ``max(abs_tol, rel_tol * |I|)`` (max-norm for vector integrands).
    """
    def expand(tris, coarse):
        kids = _children(tris)
        kid_vals = rule_on_triangles(func, kids)
        fine = kid_vals.reshape((len(tris), 4) + kid_vals.shape[1:]).sum(1)
        return kids, kid_vals, fine - coarse

    tris = np.asarray(triangle, dtype=float)[None]
    coarse = rule_on_triangles(func, tris)
    kids, kid_vals, diff = expand(tris, coarse)
    splits = 0
    while True:
        err = np.abs(diff).reshape(len(tris), -1).max(-1)
        value = (coarse + diff * (2**_RULE_ORDER / (2**_RULE_ORDER - 1))).sum(0)
        tol = max(spec.abs_tol, spec.rel_tol * float(np.abs(value).max()))
        if err.sum() <= tol:
            return value
        # split the fewest leaves that bring the remaining estimate under tol / 2
        order = np.argsort(err)[::-1]
        remaining = err.sum() - np.cumsum(err[order])
        n_split = int(np.searchsorted(-remaining, -tol / 2)) + 1
        refine = np.zeros(len(tris), dtype=bool)
        refine[order[:n_split]] = True
        splits += n_split
        if splits > spec.max_subdivisions:
            raise OracleError(f"quadrature did not converge within {spec.max_subdivisions} subdivisions")
        keep = ~refine
        sel = np.repeat(refine, 4)
        new_tris, new_coarse = kids[sel], kid_vals[sel]
        new_kids, new_kid_vals, new_diff = expand(new_tris, new_coarse)
        old_kids = kids.reshape((len(tris), 4, 3, 3))[keep].reshape(-1, 3, 3)
        old_kid_vals = kid_vals.reshape((len(tris), 4) + kid_vals.shape[1:])[keep].reshape((-1,) + kid_vals.shape[1:])
        tris = np.concatenate([tris[keep], new_tris])
        coarse = np.concatenate([coarse[keep], new_coarse])
        diff = np.concatenate([diff[keep], new_diff])
        kids = np.concatenate([old_kids, new_kids])
        kid_vals = np.concatenate([old_kid_vals, new_kid_vals])


def _face_arrays(face):
    a, b, c = (np.asarray(v, dtype=float) for v in face)
    n = np.cross(a - c, b - c)
    n = n / np.linalg.norm(n)
    return np.stack([a, b, c]), n


def _check_off_sheet(tri, n, r):
    diam = max(np.linalg.norm(tri[i] - tri[j]) for i, j in ((0, 1), (1, 2), (2, 0)))
    height = float(np.dot(r - tri[0], n))
    if abs(height) > 1e-12 * diam:
        return
    # in-plane: reject only points on the closed triangle
    t = np.linalg.lstsq(np.stack([tri[0] - tri[2], tri[1] - tri[2]], 1), r - tri[2], rcond=None)[0]
    if t.min() >= 0 and t.sum() <= 1:
        raise OracleError("evaluation point lies on the charged face")


def potential_quadrature(face, m, r, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Magnetic scalar potential of a charged face at ``r``.

    ``(1 / 4 pi) * (n . m) * integral dS' / |r - r'|`` with ``n`` along
    ``(a - c) x (b - c)``.
    """
    tri, n = _face_arrays(face)
    r = np.asarray(r, dtype=float)
    sigma = float(np.dot(n, m))
    if sigma == 0.0:
        return 0.0
    _check_off_sheet(tri, n, r)

    def kernel(pts):
        return 1.0 / np.linalg.norm(r - pts, axis=-1)

    return sigma / (4 * np.pi) * float(adaptive_triangle_integral(kernel, tri, spec))


def field_quadrature(face, m, r, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """H-field of a charged face at ``r`` from the differentiated kernel.

    ``(1 / 4 pi) * (n . m) * integral (r - r') / |r - r'|**3 dS'``.
    """
    tri, n = _face_arrays(face)
    r = np.asarray(r, dtype=float)
    sigma = float(np.dot(n, m))
    if sigma == 0.0:
        return np.zeros(3)
    _check_off_sheet(tri, n, r)

    def kernel(pts):
        d = r - pts
        return d / (np.linalg.norm(d, axis=-1) ** 3)[..., None]

    return sigma / (4 * np.pi) * adaptive_triangle_integral(kernel, tri, spec)


def tet_outward_faces(vertices):
    """The four faces of a tetrahedron (4, 3) with outward right-hand normals.

    Uses the centroid rather than the triple-product test, so it stays
    independent of the analytic path's orientation logic.
    """
    v = np.asarray(vertices, dtype=float)
    centroid = v.mean(0)
    faces = []
    for i in range(4):
        a, b, c = np.delete(v, i, axis=0)
        n = np.cross(a - c, b - c)
        if np.dot(n, (a + b + c) / 3 - centroid) < 0:
            a, c = c, a
        faces.append((a, b, c))
    return faces


def tet_field_quadrature(vertices, m, r, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """H-field of a uniformly magnetized tetrahedron, summed face by face."""
    return sum(field_quadrature(f, m, r, spec) for f in tet_outward_faces(vertices))


def tet_tensor_quadrature(vertices, r, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """Tensor columns from three oracle runs with ``m`` along x, y and z."""
    return np.stack([tet_field_quadrature(vertices, e, r, spec) for e in np.eye(3)], axis=1)


def dipole_field(moment, center, r) -> np.ndarray:
    """H-field of a point dipole, ``(3 (u . p) u - p) / (4 pi |r - c|**3)``.

    ``moment`` is magnetization times volume.
    """
    p = np.asarray(moment, dtype=float)
    d = np.asarray(r, dtype=float) - np.asarray(center, dtype=float)
    dist = np.linalg.norm(d, axis=-1, keepdims=True)
    if np.any(dist == 0):
        raise ValueError("dipole field is undefined at its center")
    u = d / dist
    return (3.0 * (u @ p)[..., None] * u - p) / (4 * np.pi * dist**3)
