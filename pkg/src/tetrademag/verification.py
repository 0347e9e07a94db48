"""Analytic-versus-quadrature comparison suite behind ``tetrademag verify``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import MagnetizedTetrahedron, tet_field
from .mesh import REFERENCE_THROUGH, EvalSet, reference_mesh
from .oracle import QuadratureSpec, tet_field_quadrature
from .sampling import face_distances, inside_points, outside_points, random_tetrahedron

#: Coordinate range of each reference line scan, meters.
SCAN_RANGE = (0.0, 6e-3)
#: Points nearer than this to a face are left out of the reference scans.
MIN_FACE_DISTANCE = 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    max_rel_err: float
    threshold: float
    n_points: int

    @property
    def passed(self) -> bool:
        return self.max_rel_err <= self.threshold

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28s} n={self.n_points:<5d} max_rel_err={self.max_rel_err:.3e}  tol={self.threshold:.1e}"


def reference_scans(n: int = 200) -> dict[str, EvalSet]:
    return {axis: EvalSet.line(axis, REFERENCE_THROUGH, *SCAN_RANGE, n) for axis in "xyz"}


def relative_errors(H, Q) -> np.ndarray:
    return np.linalg.norm(np.asarray(H) - np.asarray(Q), axis=-1) / np.linalg.norm(Q, axis=-1)


def compare_with_oracle(mt: MagnetizedTetrahedron, points, spec: QuadratureSpec) -> np.ndarray:
    H = tet_field(mt, points)
    Q = np.array([tet_field_quadrature(mt.tet.vertices, mt.m, p, spec) for p in points])
    return relative_errors(H, Q)


def check_reference(n: int = 200, tol: float = 1e-6, spec: QuadratureSpec = QuadratureSpec()) -> list[Check]:
    mesh = reference_mesh()
    mt = MagnetizedTetrahedron(mesh.tetrahedron(0), mesh.magnetization[0])
    checks = []
    for axis, es in reference_scans(n).items():
        pts = es.points[face_distances(mt.tet, es.points) > MIN_FACE_DISTANCE]
        err = compare_with_oracle(mt, pts, spec)
        checks.append(Check(f"reference scan {axis}", float(err.max()), tol, len(pts)))
    return checks


def check_random(
    seed: int = 0, n_tets: int = 5, n_points: int = 4, tol: float = 1e-6, spec: QuadratureSpec = QuadratureSpec()
) -> Check:
    """Random tetrahedra and magnetizations, points inside and outside."""
    rng = np.random.default_rng(seed)
    worst, count = 0.0, 0
    for _ in range(n_tets):
        tet = random_tetrahedron(rng)
        mt = MagnetizedTetrahedron(tet, rng.normal(size=3))
        pts = np.concatenate(
            [inside_points(tet, rng, n_points, margin=1e-3), outside_points(tet, rng, n_points, margin=1e-3)]
        )
        err = compare_with_oracle(mt, pts, spec)
        worst, count = max(worst, float(err.max())), count + len(pts)
    return Check("random tetrahedra", worst, tol, count)


def run_verification(
    seed: int = 0, tol: float = 1e-6, n: int = 200, n_random: int = 5, spec: QuadratureSpec = QuadratureSpec()
) -> list[Check]:
    return check_reference(n, tol, spec) + [check_random(seed, n_random, tol=tol, spec=spec)]
