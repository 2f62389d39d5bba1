"""Exact planar primitives shared by the tree, the hitters and the generators.

All predicates compare coordinates exactly (no epsilon) and treat rectangles,
parallelograms and polygons as closed sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "GeometryError",
    "Point",
    "AxisRect",
    "Parallelogram",
    "SimplePolygon",
    "AffineMap",
    "Homothet",
    "aspect_ratio",
    "rect_contains_point",
    "rects_intersect",
    "parallelogram_to_unit_square",
    "point_in_polygon",
    "points_in_polygon",
    "point_in_homothet_of_polygon",
    "signed_area",
]


class GeometryError(ValueError):
    pass


class Point(NamedTuple):
    x: float
    y: float


def point(x: float, y: float) -> Point:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate in ({x}, {y})")
    return Point(float(x), float(y))


class AxisRect(NamedTuple):
    """Closed axis-aligned rectangle ``[x_lo, x_hi] x [y_lo, y_hi]``."""

    x_lo: float
    y_lo: float
    x_hi: float
    y_hi: float

    @classmethod
    def checked(cls, x_lo, y_lo, x_hi, y_hi) -> "AxisRect":
        vals = (float(x_lo), float(y_lo), float(x_hi), float(y_hi))
        if not all(math.isfinite(v) for v in vals):
            raise GeometryError(f"non-finite rectangle {vals}")
        if vals[0] > vals[2] or vals[1] > vals[3]:
            raise GeometryError(f"inverted rectangle {vals}")
        return cls(*vals)

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def height(self) -> float:
        return self.y_hi - self.y_lo

    @property
    def area(self) -> float:
        return self.width * self.height

    def corners(self) -> tuple[Point, Point, Point, Point]:
        # lower-left, lower-right, upper-left, upper-right
        return (
            Point(self.x_lo, self.y_lo),
            Point(self.x_hi, self.y_lo),
            Point(self.x_lo, self.y_hi),
            Point(self.x_hi, self.y_hi),
        )

    def contains(self, p) -> bool:
        return self.x_lo <= p[0] <= self.x_hi and self.y_lo <= p[1] <= self.y_hi

    def contains_rect(self, other: "AxisRect") -> bool:
        return (
            self.x_lo <= other.x_lo
            and other.x_hi <= self.x_hi
            and self.y_lo <= other.y_lo
            and other.y_hi <= self.y_hi
        )

    def interior_contains_rect(self, other: "AxisRect") -> bool:
        return (
            self.x_lo < other.x_lo
            and other.x_hi < self.x_hi
            and self.y_lo < other.y_lo
            and other.y_hi < self.y_hi
        )

    def intersects(self, other: "AxisRect") -> bool:
        return (
            self.x_lo <= other.x_hi
            and other.x_lo <= self.x_hi
            and self.y_lo <= other.y_hi
            and other.y_lo <= self.y_hi
        )

    def mask(self, xy: np.ndarray) -> np.ndarray:
        """Closed containment test for an ``(n, 2)`` coordinate array."""
        x = xy[:, 0]
        y = xy[:, 1]
        return (x >= self.x_lo) & (x <= self.x_hi) & (y >= self.y_lo) & (y <= self.y_hi)


def aspect_ratio(r: AxisRect) -> float:
    w, h = r.width, r.height
    if w <= 0 or h <= 0:
        raise GeometryError("degenerate rectangle")
    return max(w, h) / min(w, h)


def rect_contains_point(r: AxisRect, p) -> bool:
    return r.contains(p)


def rects_intersect(a: AxisRect, b: AxisRect) -> bool:
    return a.intersects(b)


@dataclass(frozen=True)
class AffineMap:
    """``x -> linear @ x + translation`` with an invertible 2x2 linear part."""

    linear: tuple[tuple[float, float], tuple[float, float]]
    translation: tuple[float, float]

    def __post_init__(self):
        if self.determinant == 0 or not math.isfinite(self.determinant):
            raise GeometryError("affine map is not invertible")

    @property
    def determinant(self) -> float:
        (a, b), (c, d) = self.linear
        return a * d - b * c

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))

    def __call__(self, p) -> Point:
        (a, b), (c, d) = self.linear
        x, y = p[0], p[1]
        return Point(a * x + b * y + self.translation[0], c * x + d * y + self.translation[1])

    def apply(self, xy: np.ndarray) -> np.ndarray:
        lin = np.asarray(self.linear, dtype=float)
        return xy @ lin.T + np.asarray(self.translation, dtype=float)


@dataclass(frozen=True)
class Parallelogram:
    origin: Point
    u: tuple[float, float]
    v: tuple[float, float]

    def __post_init__(self):
        if self.u[0] * self.v[1] - self.u[1] * self.v[0] == 0:
            raise GeometryError("degenerate parallelogram")

    def vertices(self) -> tuple[Point, Point, Point, Point]:
        o, u, v = self.origin, self.u, self.v
        return (
            Point(o[0], o[1]),
            Point(o[0] + u[0], o[1] + u[1]),
            Point(o[0] + u[0] + v[0], o[1] + u[1] + v[1]),
            Point(o[0] + v[0], o[1] + v[1]),
        )

    def scaled(self, scale: float, shift) -> "Parallelogram":
        o = self.origin
        return Parallelogram(
            Point(scale * o[0] + shift[0], scale * o[1] + shift[1]),
            (scale * self.u[0], scale * self.u[1]),
            (scale * self.v[0], scale * self.v[1]),
        )

    def contains(self, p, tol: float = 0.0) -> bool:
        s, t = parallelogram_to_unit_square(self)(p)
        return -tol <= s <= 1 + tol and -tol <= t <= 1 + tol


def parallelogram_to_unit_square(m: Parallelogram) -> AffineMap:
    """Affine map sending ``origin, origin+u, origin+v`` to ``(0,0), (1,0), (0,1)``.

    A positive homothet ``a*m + b`` is sent to an axis-aligned square of side ``a``.
    """
    (ux, uy), (vx, vy) = m.u, m.v
    det = ux * vy - uy * vx
    if det == 0:
        raise GeometryError("degenerate parallelogram")
    inv = ((vy / det, -vx / det), (-uy / det, ux / det))
    ox, oy = m.origin
    tx = -(inv[0][0] * ox + inv[0][1] * oy)
    ty = -(inv[1][0] * ox + inv[1][1] * oy)
    return AffineMap(inv, (tx, ty))


def signed_area(vertices: Sequence) -> float:
    s = 0.0
    k = len(vertices)
    for i in range(k):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % k]
        s += x0 * y1 - x1 * y0
    return s / 2


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p) -> bool:
    return (
        _orient(a, b, p) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_intersect(a, b, c, d) -> bool:
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return _on_segment(c, d, a) or _on_segment(c, d, b) or _on_segment(a, b, c) or _on_segment(a, b, d)


@dataclass(frozen=True)
class SimplePolygon:
    """Counterclockwise simple polygon without holes."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(point(*v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        k = len(verts)
        if k < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        for i in range(k):
            if verts[i] == verts[(i + 1) % k]:
                raise GeometryError("repeated consecutive vertex")
        if signed_area(verts) <= 0:
            raise GeometryError("polygon must be counterclockwise with positive area")
        # non-adjacent edges must not touch
        for i in range(k):
            a, b = verts[i], verts[(i + 1) % k]
            for j in range(i + 1, k):
                if j == i + 1 or (i == 0 and j == k - 1):
                    continue
                c, d = verts[j], verts[(j + 1) % k]
                if _segments_intersect(a, b, c, d):
                    raise GeometryError("polygon boundary self-intersects")
        for i in range(k):
            # adjacent edges may only share their common vertex
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % k]
            if _orient(a, b, c) == 0 and (
                (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) < 0
            ):
                raise GeometryError("polygon boundary folds back on itself")

    @classmethod
    def from_coords(cls, coords) -> "SimplePolygon":
        return cls(tuple(Point(float(x), float(y)) for x, y in coords))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def bbox(self) -> AxisRect:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return AxisRect(min(xs), min(ys), max(xs), max(ys))

    def contains(self, p) -> bool:
        return point_in_polygon(p, self)


@dataclass(frozen=True)
class Homothet:
    scale: float
    translation: tuple[float, float]

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise GeometryError("homothet scale must be positive")
        tx, ty = self.translation
        if not (math.isfinite(tx) and math.isfinite(ty)):
            raise GeometryError("non-finite homothet translation")

    def __call__(self, p) -> Point:
        return Point(self.scale * p[0] + self.translation[0], self.scale * p[1] + self.translation[1])

    def inverse(self, p) -> Point:
        return Point((p[0] - self.translation[0]) / self.scale, (p[1] - self.translation[1]) / self.scale)


def point_in_polygon(p, poly: SimplePolygon) -> bool:
    """Closed point-in-polygon: ray crossing with explicit on-edge detection."""
    x, y = p[0], p[1]
    verts = poly.vertices
    k = len(verts)
    inside = False
    for i in range(k):
        a, b = verts[i], verts[(i + 1) % k]
        if _on_segment(a, b, (x, y)):
            return True
        if (a.y > y) != (b.y > y):
            xc = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y)
            if x < xc:
                inside = not inside
    return inside


def points_in_polygon(xy: np.ndarray, poly: SimplePolygon) -> np.ndarray:
    """Vectorised :func:`point_in_polygon` over an ``(n, 2)`` array."""
    x = xy[:, 0]
    y = xy[:, 1]
    inside = np.zeros(len(xy), dtype=bool)
    boundary = np.zeros(len(xy), dtype=bool)
    verts = poly.vertices
    k = len(verts)
    for i in range(k):
        (ax, ay), (bx, by) = verts[i], verts[(i + 1) % k]
        orient = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        boundary |= (
            (orient == 0)
            & (x >= min(ax, bx)) & (x <= max(ax, bx))
            & (y >= min(ay, by)) & (y <= max(ay, by))
        )
        straddle = (ay > y) != (by > y)
        if ay != by:
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = ax + (y - ay) * (bx - ax) / (by - ay)
            inside ^= straddle & (x < xc)
    return inside | boundary


def point_in_homothet_of_polygon(p, poly: SimplePolygon, h: Homothet) -> bool:
    return point_in_polygon(h.inverse(p), poly)
