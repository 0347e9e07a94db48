"""Tetrahedral meshes, evaluation point sets and field records.

Mesh files are JSON documents::

    {
      "unit": "mm",
      "vertices": [[x, y, z], ...],
      "elements": [[i, j, k, l], ...],
      "magnetization": [[mx, my, mz], ...]
    }

``unit`` is ``"m"``, ``"cm"``, ``"mm"``, ``"um"`` or a number giving meters
per file unit. Vertices are converted to meters on load; magnetization is
in A/m. Point and field files are CSV with 17 significant digits, which
round-trips 64-bit floats exactly.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .assembly import MU0, FaceFrames, tet_frames, frames_field, frames_tensor
from .geometry import _CONTAINMENT, CODE_OUTSIDE, Containment, GeometryError, Tetrahedron, containment_codes

UNITS = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6}

FIELD_HEADER = ["x", "y", "z", "Hx", "Hy", "Hz", "Bx", "By", "Bz", "Hnorm", "containment", "element"]


class MeshFormatError(ValueError):
    """The mesh file cannot be parsed."""


class MeshValidationError(ValueError):
    """The mesh parses but violates a geometric or bookkeeping invariant."""


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def unit_scale(unit) -> float:
    if isinstance(unit, str):
        try:
            return UNITS[unit]
        except KeyError:
            raise MeshFormatError(f"unknown unit {unit!r}; expected one of {sorted(UNITS)} or a number") from None
    if isinstance(unit, (int, float)) and not isinstance(unit, bool) and np.isfinite(unit) and unit > 0:
        return float(unit)
    raise MeshFormatError(f"invalid unit {unit!r}")


@dataclass
class TetMesh:
    """Tetrahedral mesh in SI units with one magnetization per element.

    ``unit`` records the length unit declared by the source file; the
    stored vertices are always in meters.
    """

    vertices: np.ndarray
    elements: np.ndarray
    magnetization: np.ndarray
    unit: str | float = "m"
    _frames: list = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.elements = np.asarray(self.elements, dtype=np.int64).reshape(-1, 4)
        self.magnetization = np.asarray(self.magnetization, dtype=float).reshape(-1, 3)
        self.validate()

    def validate(self) -> None:
        if len(self.elements) == 0:
            raise MeshValidationError("no elements")
        if len(self.magnetization) != len(self.elements):
            raise MeshValidationError(
                f"magnetization length mismatch: {len(self.magnetization)} vectors for {len(self.elements)} elements"
            )
        if not np.all(np.isfinite(self.vertices)):
            bad = int(np.flatnonzero(~np.isfinite(self.vertices).all(1))[0])
            raise MeshValidationError(f"vertex {bad} has non-finite coordinates")
        if not np.all(np.isfinite(self.magnetization)):
            bad = int(np.flatnonzero(~np.isfinite(self.magnetization).all(1))[0])
            raise MeshValidationError(f"magnetization {bad} has non-finite components")
        n = len(self.vertices)
        for e, idx in enumerate(self.elements):
            out = [int(i) for i in idx if i < 0 or i >= n]
            if out:
                raise MeshValidationError(f"element {e} references vertex {out[0]} out of range (0..{n - 1})")
        for e in range(len(self.elements)):
            try:
                self.tetrahedron(e)
            except GeometryError:
                raise MeshValidationError(f"degenerate element {e}") from None

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def tetrahedron(self, e: int) -> Tetrahedron:
        return Tetrahedron.from_array(self.vertices[self.elements[e]])

    def frames(self) -> list[FaceFrames]:
        """Per-element face frames, computed once and cached."""
        if self._frames is None:
            self._frames = [tet_frames(self.tetrahedron(e)) for e in range(self.n_elements)]
        return self._frames

    def field(self, points) -> np.ndarray:
        """Total H-field at ``points`` (n, 3), summed in element order."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        H = np.zeros_like(points)
        for frames, m in zip(self.frames(), self.magnetization):
            H += frames_field(frames, m, points)
        return H

    def tensors(self, points) -> np.ndarray:
        """Per-element tensors at ``points``; shape (n, n_elements, 3, 3)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.stack([frames_tensor(f, points) for f in self.frames()], axis=1)

    def locate(self, points):
        """Containment and owning element (-1 when outside) for each point.

        A point inside any element is ``inside``; otherwise a point on an
        element boundary is ``boundary``. The owner is the lowest element
        index with the winning classification.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        # lower code wins
        rank = np.full(len(points), CODE_OUTSIDE)
        owner = np.full(len(points), -1, dtype=np.int64)
        for e in range(self.n_elements):
            code = containment_codes(self.tetrahedron(e), points)
            better = code < rank
            owner[better] = e
            rank[better] = code[better]
        return _CONTAINMENT[rank], owner


def parse_mesh(text: str, source: str = "<string>") -> TetMesh:
    """Parse mesh JSON text; see the module docstring for the schema."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise MeshFormatError(f"{source}: top level must be an object")
    missing = [k for k in ("vertices", "elements", "magnetization") if k not in doc]
    if missing:
        raise MeshFormatError(f"{source}: missing key {missing[0]!r}")
    scale = unit_scale(doc.get("unit", "m"))

    def table(key, width, kind):
        rows = doc[key]
        if not isinstance(rows, list):
            raise MeshFormatError(f"{source}: {key!r} must be a list")
        for i, row in enumerate(rows):
            if (
                not isinstance(row, list)
                or len(row) != width
                or not all(isinstance(v, kind) and not isinstance(v, bool) for v in row)
            ):
                raise MeshFormatError(f"{source}: {key}[{i}] must be a list of {width} {kind_name[kind]}")
        return rows

    kind_name = {int: "integers", (int, float): "numbers"}
    vertices = np.array(table("vertices", 3, (int, float)), dtype=float).reshape(-1, 3) * scale
    elements = np.array(table("elements", 4, int), dtype=np.int64).reshape(-1, 4)
    magnetization = np.array(table("magnetization", 3, (int, float)), dtype=float).reshape(-1, 3)
    return TetMesh(vertices, elements, magnetization, unit=doc.get("unit", "m"))


def load_mesh(path) -> TetMesh:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MeshFormatError(f"{path}: {exc.strerror}") from None
    return parse_mesh(text, source=str(path))


def dump_mesh(mesh: TetMesh, path=None) -> str:
    """Serialize ``mesh`` (in meters) to JSON; write to ``path`` if given."""
    doc = {
        "unit": "m",
        "vertices": mesh.vertices.tolist(),
        "elements": mesh.elements.tolist(),
        "magnetization": mesh.magnetization.tolist(),
    }
    text = json.dumps(doc, indent=1)
    if path is not None:
        Path(path).write_text(text)
    return text


def reference_mesh() -> TetMesh:
    """The single-tetrahedron verification fixture shipped with the package."""
    text = resources.files("tetrademag").joinpath("data/reference_tetrahedron.json").read_text()
    return parse_mesh(text, source="reference_tetrahedron.json")


#: Interior point through which the reference line scans run, in meters.
REFERENCE_THROUGH = np.array([3.0, 3.0, 2.5]) * 1e-3


# ---------------------------------------------------------------------------
# Evaluation points
# ---------------------------------------------------------------------------


@dataclass
class EvalSet:
    points: np.ndarray
    provenance: dict = field(default_factory=lambda: {"kind": "explicit"})

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if len(self.points) < 1:
            raise ValueError("an evaluation set needs at least one point")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("evaluation points must be finite")

    @classmethod
    def line(cls, axis: str, through, start: float, stop: float, n: int) -> "EvalSet":
        """``n`` points along a Cartesian axis through ``through``.

        ``start`` and ``stop`` are absolute coordinates along ``axis``.
        """
        if axis not in "xyz" or len(axis) != 1:
            raise ValueError(f"axis must be x, y or z, got {axis!r}")
        if n < 1:
            raise ValueError("n must be at least 1")
        i = "xyz".index(axis)
        pts = np.tile(np.asarray(through, dtype=float), (n, 1))
        pts[:, i] = np.linspace(start, stop, n)
        prov = {"kind": "line", "axis": axis, "through": list(map(float, through)), "range": [start, stop], "n": n}
        return cls(pts, prov)

    @classmethod
    def grid(cls, lo, hi, shape) -> "EvalSet":
        axes = [np.linspace(a, b, n) for a, b, n in zip(lo, hi, shape)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        return cls(pts, {"kind": "grid", "lo": list(lo), "hi": list(hi), "shape": list(shape)})


def parse_line_spec(spec: str) -> EvalSet:
    """Parse ``axis=x,through=X:Y:Z,range=A:B,n=N`` (lengths in meters)."""
    try:
        fields = dict(item.split("=", 1) for item in spec.split(","))
        through = [float(v) for v in fields["through"].split(":")]
        start, stop = (float(v) for v in fields["range"].split(":"))
        n = int(fields.get("n", 200))
        axis = fields["axis"]
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad line spec {spec!r}: {exc}") from None
    if len(through) != 3:
        raise ValueError(f"bad line spec {spec!r}: through needs three coordinates")
    return EvalSet.line(axis, through, start, stop, n)


def write_points_csv(evalset: EvalSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "z"])
        for p in evalset.points:
            w.writerow([fmt(v) for v in p])


def read_points_csv(path) -> EvalSet:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y", "z"]:
        raise ValueError(f"{path}: expected header x,y,z")
    try:
        pts = [[float(v) for v in row] for row in rows[1:] if row]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    return EvalSet(np.array(pts), {"kind": "explicit", "source": str(path)})


# ---------------------------------------------------------------------------
# Field records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldRecord:
    point: np.ndarray
    H: np.ndarray
    B: np.ndarray
    H_norm: float
    containment: Containment
    element: int | None


def evaluate(mesh: TetMesh, evalset: EvalSet) -> list[FieldRecord]:
    """H, B and containment at every point of ``evalset``.

    H sums the elements in ascending index order. B adds the owning
    element's magnetization for inside and boundary points.
    """
    pts = evalset.points
    H = mesh.field(pts)
    where, owner = mesh.locate(pts)
    M = np.where((owner >= 0)[:, None], mesh.magnetization[np.maximum(owner, 0)], 0.0)
    B = MU0 * (H + M)
    norms = np.linalg.norm(H, axis=1)
    return [
        FieldRecord(pts[i], H[i], B[i], float(norms[i]), Containment(where[i]), int(owner[i]) if owner[i] >= 0 else None)
        for i in range(len(pts))
    ]


def write_field_csv(records, out) -> None:
    """Write records to a path or an open text stream."""
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="") as fh:
            return write_field_csv(records, fh)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FIELD_HEADER)
    for rec in records:
        w.writerow(
            [fmt(v) for v in (*rec.point, *rec.H, *rec.B, rec.H_norm)]
            + [rec.containment.value, "" if rec.element is None else rec.element]
        )


def read_field_csv(source) -> list[FieldRecord]:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_field_csv(fh)
    rows = list(csv.reader(source))
    if not rows or rows[0] != FIELD_HEADER:
        raise ValueError("unexpected field CSV header")
    out = []
    for row in rows[1:]:
        v = [float(s) for s in row[:10]]
        out.append(
            FieldRecord(
                np.array(v[0:3]),
                np.array(v[3:6]),
                np.array(v[6:9]),
                v[9],
                Containment(row[10]),
                int(row[11]) if row[11] else None,
            )
        )
    return out


def field_csv_text(records) -> str:
    buf = io.StringIO()
    write_field_csv(records, buf)
    return buf.getvalue()
