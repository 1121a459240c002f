"""JSON system specifications.

A spec file describes either a finite relation or an interval function::

    {"kind": "finite", "name": "fib", "labels": [0, 1],
     "coords": ["0", "1"], "adjacency": [[1], [0, 1]]}

    {"kind": "interval", "name": "diamond", "grid": 257,
     "segments": [[["0", "1/2"], ["1/2", "0"]], ...], "points": [], "polygons": []}

Numbers may be JSON numbers, decimal strings or ``"p/q"`` strings and are
held as :class:`~fractions.Fraction`.  A finite spec gives either
``coords`` (points on the line) or ``dist`` (a distance matrix); with
neither the discrete metric is used.  ``adjacency`` is a list of image
label lists aligned with ``labels``, or a mapping from ``str(label)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .core import FiniteRelation, MetricPointSet
from .interval import IntervalSVF


class SpecError(ValueError):
    """Load failure with the offending field or source position."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    name: str = ""
    notes: str = ""
    labels: tuple = ()
    coords: tuple | None = None
    dist: tuple | None = None
    adjacency: tuple = ()
    segments: tuple = ()
    points: tuple = ()
    polygons: tuple = ()
    grid: int | None = None
    scale: Fraction | None = field(default=None, compare=False)

    def build(self) -> FiniteRelation | IntervalSVF:
        """The validated, diameter-normalized system."""
        if self.kind == "interval":
            return IntervalSVF(self.segments, self.points, self.polygons)
        if self.coords is not None:
            space = MetricPointSet.from_coords(self.coords, self.labels)
        elif self.dist is not None:
            space = MetricPointSet.from_matrix(self.labels, [[float(v) for v in r] for r in self.dist])
        else:
            space = MetricPointSet.discrete(self.labels)
        return FiniteRelation.from_images(space, dict(zip(self.labels, self.adjacency)))


def _num(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise SpecError(where, f"expected a number, got {v!r}")
    try:
        return Fraction(str(v)) if not isinstance(v, str) else Fraction(v.strip())
    except (ValueError, ZeroDivisionError):
        raise SpecError(where, f"cannot read {v!r} as a number") from None


def _point(v, where: str) -> tuple:
    if not isinstance(v, list) or len(v) != 2:
        raise SpecError(where, "a point is a two-element list [x, y]")
    return (_num(v[0], f"{where}[0]"), _num(v[1], f"{where}[1]"))


def _build_checked(spec: SystemSpec, where: str):
    try:
        return spec.build()
    except KeyError as exc:
        raise SpecError(f"{where}.adjacency", str(exc.args[0])) from None
    except ValueError as exc:
        field_name = "adjacency" if spec.kind == "finite" else "graph"
        raise SpecError(f"{where}.{field_name}", str(exc)) from None


def spec_from_dict(data: dict, where: str = "spec") -> SystemSpec:
    if not isinstance(data, dict):
        raise SpecError(where, "top level must be a JSON object")
    kind = data.get("kind")
    if kind not in ("finite", "interval"):
        raise SpecError(f"{where}.kind", f"must be 'finite' or 'interval', got {kind!r}")
    known = {"kind", "name", "notes", "labels", "coords", "dist", "adjacency",
             "segments", "points", "polygons", "grid"}
    extra = sorted(set(data) - known)
    if extra:
        raise SpecError(f"{where}.{extra[0]}", "unknown field")
    name = str(data.get("name", ""))
    notes = str(data.get("notes", ""))
    grid = data.get("grid")
    if grid is not None and (not isinstance(grid, int) or isinstance(grid, bool) or grid < 2):
        raise SpecError(f"{where}.grid", "must be an integer >= 2")

    if kind == "interval":
        segs = []
        for i, s in enumerate(data.get("segments", [])):
            w = f"{where}.segments[{i}]"
            if not isinstance(s, list) or len(s) != 2:
                raise SpecError(w, "a segment is a pair of points")
            segs.append((_point(s[0], f"{w}[0]"), _point(s[1], f"{w}[1]")))
        pts = tuple(_point(p, f"{where}.points[{i}]") for i, p in enumerate(data.get("points", [])))
        polys = []
        for i, poly in enumerate(data.get("polygons", [])):
            w = f"{where}.polygons[{i}]"
            if not isinstance(poly, list):
                raise SpecError(w, "a polygon is a list of vertices")
            polys.append(tuple(_point(p, f"{w}[{j}]") for j, p in enumerate(poly)))
        spec = SystemSpec("interval", name, notes, segments=tuple(segs), points=pts,
                          polygons=tuple(polys), grid=grid, scale=Fraction(1))
        _build_checked(spec, where)
        return spec

    labels = data.get("labels")
    if not isinstance(labels, list) or not labels:
        raise SpecError(f"{where}.labels", "need a non-empty list of labels")
    labels = tuple(labels)
    coords = dist = None
    if "coords" in data and "dist" in data:
        raise SpecError(where, "give either coords or dist, not both")
    if "coords" in data:
        raw = data["coords"]
        if not isinstance(raw, list) or len(raw) != len(labels):
            raise SpecError(f"{where}.coords", f"need {len(labels)} coordinates")
        coords = tuple(_num(v, f"{where}.coords[{i}]") for i, v in enumerate(raw))
    elif "dist" in data:
        raw = data["dist"]
        if not isinstance(raw, list) or len(raw) != len(labels):
            raise SpecError(f"{where}.dist", f"need {len(labels)} rows")
        rows = []
        for i, r in enumerate(raw):
            if not isinstance(r, list) or len(r) != len(labels):
                raise SpecError(f"{where}.dist[{i}]", f"need {len(labels)} entries")
            rows.append(tuple(_num(v, f"{where}.dist[{i}][{j}]") for j, v in enumerate(r)))
        dist = tuple(rows)

    raw = data.get("adjacency")
    if isinstance(raw, dict):
        keyed = {str(k): v for k, v in raw.items()}
        raw = [keyed.get(str(lab), []) for lab in labels]
    if not isinstance(raw, list) or len(raw) != len(labels):
        raise SpecError(f"{where}.adjacency", f"need one image list per label ({len(labels)})")
    adjacency = []
    for i, img in enumerate(raw):
        w = f"{where}.adjacency[{i}]"
        if not isinstance(img, list):
            raise SpecError(w, "an image is a list of labels")
        if not img:
            raise SpecError(w, f"F({labels[i]!r}) is empty; every image must be non-empty")
        adjacency.append(tuple(img))
    spec = SystemSpec("finite", name, notes, labels, coords, dist, tuple(adjacency), grid=grid)
    F = _build_checked(spec, where)
    return SystemSpec("finite", name, notes, labels, coords, dist, tuple(adjacency),
                      grid=grid, scale=Fraction(F.space.scale).limit_denominator(10**12))


def bundled_path(name: str) -> Path:
    """Path of a bundled system, for example ``"diamond.json"`` or ``"diamond"``."""
    fname = name if name.endswith(".json") else name + ".json"
    return Path(str(resources.files("svfentropy") / "systems" / fname))


def bundled_names() -> list[str]:
    root = resources.files("svfentropy") / "systems"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def parse_spec(path) -> SystemSpec:
    """Load a spec file; bare bundled names are accepted when no such file exists."""
    p = Path(path)
    if not p.exists():
        alt = bundled_path(str(path))
        if not alt.exists():
            raise FileNotFoundError(f"no such spec file or bundled system: {path}")
        p = alt
    text = p.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{p.name}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return spec_from_dict(data, p.name)


def _out(v: Fraction) -> str:
    return str(v)


def spec_to_dict(spec: SystemSpec) -> dict:
    out: dict = {"kind": spec.kind}
    if spec.name:
        out["name"] = spec.name
    if spec.notes:
        out["notes"] = spec.notes
    if spec.kind == "interval":
        out["segments"] = [[[_out(a), _out(b)] for a, b in s] for s in spec.segments]
        out["points"] = [[_out(a), _out(b)] for a, b in spec.points]
        out["polygons"] = [[[_out(a), _out(b)] for a, b in poly] for poly in spec.polygons]
    else:
        out["labels"] = list(spec.labels)
        if spec.coords is not None:
            out["coords"] = [_out(v) for v in spec.coords]
        if spec.dist is not None:
            out["dist"] = [[_out(v) for v in r] for r in spec.dist]
        out["adjacency"] = [list(img) for img in spec.adjacency]
    if spec.grid is not None:
        out["grid"] = spec.grid
    return out


def write_spec(spec: SystemSpec, path) -> Path:
    p = Path(path)
    p.write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n", encoding="utf-8")
    return p


def spec_from_relation(F: FiniteRelation, name: str = "", notes: str = "") -> SystemSpec:
    """Spec of a relation; coordinates are kept when the space has them."""
    labels = tuple(F.labels)
    adjacency = tuple(tuple(labels[j] for j in F.image_indices(i)) for i in range(len(F)))
    if F.space.coords is not None:
        return SystemSpec("finite", name, notes, labels, tuple(F.space.coords), None, adjacency,
                          scale=Fraction(1))
    dist = tuple(tuple(Fraction(float(v)) for v in row) for row in F.space.dist)
    return SystemSpec("finite", name, notes, labels, None, dist, adjacency, scale=Fraction(1))


__all__ = ["SpecError", "SystemSpec", "bundled_names", "bundled_path", "parse_spec",
           "spec_from_dict", "spec_from_relation", "spec_to_dict", "write_spec"]
