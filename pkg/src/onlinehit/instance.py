"""Instance files (JSON, ``"format": 1``) and round logs (JSON lines).

Instances are written one point and one object per line so that parse
errors can point at a line as well as a field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .geometry import AxisRect, GeometryError, Homothet, SimplePolygon
from .online import InfeasibleObject

__all__ = [
    "FORMAT",
    "ParseError",
    "Instance",
    "dumps",
    "loads",
    "read_instance",
    "write_instance",
    "read_polygon",
    "write_jsonl",
]

FORMAT = 1
MODES = ("rects", "homothets")


class ParseError(ValueError):
    """Malformed instance text; carries the line (1-based) and field when known."""

    def __init__(self, msg: str, line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{msg} ({', '.join(where)})" if where else msg)
        self.line = line
        self.field = field


@dataclass(eq=False)
class Instance:
    points: np.ndarray
    mode: str
    objects: list
    polygon: Optional[SimplePolygon] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "homothets" and self.polygon is None:
            raise ValueError("mode 'homothets' requires a polygon")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.objects)

    def object_masks(self):
        """Closed containment mask over the points, one per object."""
        xy = self.points
        for obj in self.objects:
            if self.mode == "rects":
                yield obj.mask(xy)
            else:
                from .geometry import points_in_polygon

                yield points_in_polygon((xy - np.asarray(obj.translation)) / obj.scale, self.polygon)

    def check_feasible(self) -> None:
        for i, mask in enumerate(self.object_masks()):
            if not mask.any():
                raise InfeasibleObject("infeasible object", i)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "mode": self.mode,
            "meta": self.meta,
            "polygon": None if self.polygon is None else [[float(v.x), float(v.y)] for v in self.polygon.vertices],
            "points": self.points.tolist(),
            "objects": [_object_record(o) for o in self.objects],
        }

    def same_as(self, other: "Instance") -> bool:
        return self.to_dict() == other.to_dict()


def _object_record(o) -> dict:
    if isinstance(o, Homothet):
        return {"scale": float(o.scale), "tx": float(o.translation[0]), "ty": float(o.translation[1])}
    return {"x_lo": float(o.x_lo), "y_lo": float(o.y_lo), "x_hi": float(o.x_hi), "y_hi": float(o.y_hi)}


def _j(v: Any) -> str:
    return json.dumps(v, allow_nan=False)


def dumps(inst: Instance) -> str:
    d = inst.to_dict()
    out = ["{"]
    out.append(f'  "format": {FORMAT},')
    out.append(f'  "mode": {_j(d["mode"])},')
    out.append(f'  "meta": {json.dumps(d["meta"], sort_keys=True, allow_nan=False)},')
    out.append(f'  "polygon": {_j(d["polygon"])},')
    for key in ("points", "objects"):
        rows = d[key]
        if not rows:
            out.append(f'  "{key}": []' + ("," if key == "points" else ""))
            continue
        out.append(f'  "{key}": [')
        for i, r in enumerate(rows):
            out.append("    " + _j(r) + ("," if i + 1 < len(rows) else ""))
        out.append("  ]" + ("," if key == "points" else ""))
    out.append("}")
    return "\n".join(out) + "\n"


def _line_of(text: str, key: str, index: Optional[int]) -> Optional[int]:
    """Line of ``key`` (or of its ``index``-th element in the one-per-line layout)."""
    lines = text.splitlines()
    for ln, s in enumerate(lines):
        if s.lstrip().startswith(f'"{key}"'):
            if index is None:
                return ln + 1
            if s.rstrip().endswith("["):
                target = ln + 1 + index
                if target < len(lines):
                    return target + 1
            return ln + 1
    return None


def _number(v, text, key, index, fname) -> float:
    label = f"{key}[{index}]" + (f".{fname}" if fname else "")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", _line_of(text, key, index), label)
    if not math.isfinite(v):
        raise ParseError("non-finite number", _line_of(text, key, index), label)
    return float(v)


def loads(text: str) -> Instance:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", e.lineno) from None
    if not isinstance(d, dict):
        raise ParseError("top level must be an object", 1)
    if d.get("format") != FORMAT:
        raise ParseError(f"unsupported format {d.get('format')!r}", _line_of(text, "format", None), "format")
    mode = d.get("mode")
    if mode not in MODES:
        raise ParseError(f"mode must be one of {MODES}", _line_of(text, "mode", None), "mode")
    meta = d.get("meta", {})
    if not isinstance(meta, dict):
        raise ParseError("meta must be an object", _line_of(text, "meta", None), "meta")

    poly = None
    raw_poly = d.get("polygon")
    if raw_poly is not None:
        try:
            poly = SimplePolygon.from_coords([(float(x), float(y)) for x, y in raw_poly])
        except (TypeError, ValueError) as e:
            raise ParseError(f"bad polygon: {e}", _line_of(text, "polygon", None), "polygon") from None
    if mode == "homothets" and poly is None:
        raise ParseError("mode 'homothets' requires a polygon", _line_of(text, "polygon", None), "polygon")

    raw_pts = d.get("points")
    if not isinstance(raw_pts, list):
        raise ParseError("points must be a list", _line_of(text, "points", None), "points")
    pts = []
    for i, p in enumerate(raw_pts):
        if not isinstance(p, list) or len(p) != 2:
            raise ParseError("point must be [x, y]", _line_of(text, "points", i), f"points[{i}]")
        pts.append((_number(p[0], text, "points", i, "x"), _number(p[1], text, "points", i, "y")))

    raw_obj = d.get("objects")
    if not isinstance(raw_obj, list):
        raise ParseError("objects must be a list", _line_of(text, "objects", None), "objects")
    names = ("x_lo", "y_lo", "x_hi", "y_hi") if mode == "rects" else ("scale", "tx", "ty")
    objs = []
    for i, o in enumerate(raw_obj):
        if not isinstance(o, dict):
            raise ParseError("object must be a record", _line_of(text, "objects", i), f"objects[{i}]")
        for f in names:
            if f not in o:
                raise ParseError("missing field", _line_of(text, "objects", i), f"objects[{i}].{f}")
        vals = [_number(o[f], text, "objects", i, f) for f in names]
        try:
            objs.append(AxisRect.checked(*vals) if mode == "rects" else Homothet(vals[0], (vals[1], vals[2])))
        except GeometryError as e:
            raise ParseError(str(e), _line_of(text, "objects", i), f"objects[{i}]") from None
    return Instance(np.array(pts, dtype=float).reshape(-1, 2), mode, objs, poly, meta)


def write_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(inst))


def read_instance(path: Union[str, Path]) -> Instance:
    return loads(Path(path).read_text())


def read_polygon(path: Union[str, Path]) -> SimplePolygon:
    """A vertex list ``[[x, y], ...]`` or a record with a ``polygon`` key."""
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", e.lineno) from None
    if isinstance(d, dict):
        d = d.get("polygon")
    try:
        return SimplePolygon.from_coords([(float(x), float(y)) for x, y in d])
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad polygon: {e}", field="polygon") from None


def write_jsonl(records, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
