"""Random tetrahedra and evaluation points for verification and benchmarks."""
from __future__ import annotations

import numpy as np

from .geometry import CODE_OUTSIDE, Tetrahedron, containment_codes


def random_tetrahedron(rng: np.random.Generator, scale: float = 1.0, min_quality: float = 0.02) -> Tetrahedron:
    """Tetrahedron with vertices uniform in a cube of side ``scale``.

    Slivers with ``volume / longest_edge**3`` below ``min_quality`` are
    redrawn.
    """
    while True:
        v = rng.uniform(0.0, scale, size=(4, 3))
        vol = abs(np.dot(np.cross(v[0] - v[3], v[1] - v[3]), v[2] - v[3])) / 6.0
        edge = max(np.linalg.norm(v[i] - v[j]) for i in range(4) for j in range(i + 1, 4))
        if vol >= min_quality * edge**3:
            return Tetrahedron.from_array(v)


def face_distances(tet: Tetrahedron, r) -> np.ndarray:
    """Euclidean distance from each point in ``r`` (n, 3) to the nearest face."""
    r = np.atleast_2d(np.asarray(r, dtype=float))
    v = tet.vertices
    best = np.full(len(r), np.inf)
    for skip in range(4):
        a, b, c = np.delete(v, skip, axis=0)
        best = np.minimum(best, _point_triangle_distance(r, a, b, c))
    return best


def _segment_distance(r, p, q):
    d = q - p
    t = np.clip(((r - p) @ d) / (d @ d), 0.0, 1.0)
    return np.linalg.norm(r - (p + t[:, None] * d), axis=1)


def _point_triangle_distance(r, a, b, c):
    n = np.cross(b - a, c - a)
    n = n / np.linalg.norm(n)
    h = (r - a) @ n
    foot = r - h[:, None] * n
    inside = np.ones(len(r), dtype=bool)
    for p, q in ((a, b), (b, c), (c, a)):
        inside &= (np.cross(q - p, foot - p) @ n) >= 0
    edge = np.minimum.reduce([_segment_distance(r, a, b), _segment_distance(r, b, c), _segment_distance(r, c, a)])
    return np.where(inside, np.abs(h), edge)


def inside_points(tet: Tetrahedron, rng: np.random.Generator, n: int, margin: float = 0.0) -> np.ndarray:
    """Uniform interior points at least ``margin * longest_edge`` from every face."""
    out = []
    while sum(len(o) for o in out) < n:
        w = rng.dirichlet(np.ones(4), size=4 * n)
        pts = w @ tet.vertices
        if margin > 0:
            pts = pts[face_distances(tet, pts) >= margin * tet.longest_edge]
        out.append(pts)
    return np.concatenate(out)[:n]


def outside_points(
    tet: Tetrahedron, rng: np.random.Generator, n: int, margin: float = 0.0, extent: float = 2.0
) -> np.ndarray:
    """Exterior points within ``extent`` circumradii of the centroid.

    Points nearer than ``margin * longest_edge`` to the surface are dropped.
    """
    out = []
    R, c = tet.circumradius, tet.centroid
    while sum(len(o) for o in out) < n:
        pts = c + rng.uniform(-extent * R, extent * R, size=(4 * n, 3))
        pts = pts[containment_codes(tet, pts) == CODE_OUTSIDE]
        if margin > 0:
            pts = pts[face_distances(tet, pts) >= margin * tet.longest_edge]
        out.append(pts)
    return np.concatenate(out)[:n]


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
