"""Positive homothets of a simple polygon, reduced to squares piece by piece.

The polygon is triangulated by ear clipping and every triangle is covered by
three parallelograms (the central midpoint triangle glued to each corner
triangle).  An affine map per parallelogram turns its homothets into
axis-aligned squares, and one square hitter per piece runs on the mapped
point set.  The global hitting set is the union of the pieces' sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import online
from .bbd import BBDTree, build
from .geometry import (
    AffineMap,
    AxisRect,
    GeometryError,
    Homothet,
    Parallelogram,
    Point,
    SimplePolygon,
    _orient,
    parallelogram_to_unit_square,
    points_in_polygon,
)
from .online import HitterState, InfeasibleObject, RoundReport

__all__ = [
    "Triangle",
    "Decomposition",
    "MultiRoundReport",
    "MultiHitterState",
    "triangulate",
    "triangle_to_parallelograms",
    "decompose",
    "is_parallelogram",
    "init_multi",
    "process_homothet",
    "piece_square",
]

Triangle = tuple[Point, Point, Point]


def _in_closed_triangle(p, a, b, c) -> bool:
    return _orient(a, b, p) >= 0 and _orient(b, c, p) >= 0 and _orient(c, a, p) >= 0


def triangulate(poly: SimplePolygon) -> list[Triangle]:
    """Ear clipping; ``k - 2`` counterclockwise triangles for ``k`` vertices."""
    verts = list(poly.vertices)
    idx = list(range(len(verts)))
    out: list[Triangle] = []
    while len(idx) > 3:
        k = len(idx)
        for i in range(k):
            ia, ib, ic = idx[i - 1], idx[i], idx[(i + 1) % k]
            a, b, c = verts[ia], verts[ib], verts[ic]
            if _orient(a, b, c) <= 0:
                continue
            if any(
                _in_closed_triangle(verts[j], a, b, c) for j in idx if j not in (ia, ib, ic)
            ):
                continue
            out.append((a, b, c))
            del idx[i]
            break
        else:
            raise GeometryError("degenerate polygon: no ear found")
    a, b, c = (verts[j] for j in idx)
    if _orient(a, b, c) <= 0:
        raise GeometryError("degenerate polygon: flat final triangle")
    out.append((a, b, c))
    return out


def _mid(p, q) -> Point:
    return Point((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


def triangle_to_parallelograms(t) -> list[Parallelogram]:
    """Three parallelograms whose union is the triangle, one per corner."""
    a, b, c = (Point(float(p[0]), float(p[1])) for p in t)
    o = _orient(a, b, c)
    if o == 0:
        raise GeometryError("degenerate triangle")
    if o < 0:
        b, c = c, b
    mab, mbc, mca = _mid(a, b), _mid(b, c), _mid(c, a)
    out = []
    for corner, nxt, prv in ((a, mab, mca), (b, mbc, mab), (c, mca, mbc)):
        u = (nxt[0] - corner[0], nxt[1] - corner[1])
        v = (prv[0] - corner[0], prv[1] - corner[1])
        out.append(Parallelogram(corner, u, v))
    return out


def is_parallelogram(poly: SimplePolygon) -> bool:
    if len(poly) != 4:
        return False
    v0, v1, v2, v3 = poly.vertices
    return (v1.x - v0.x, v1.y - v0.y) == (v2.x - v3.x, v2.y - v3.y)


@dataclass(frozen=True)
class Decomposition:
    polygon: SimplePolygon
    triangles: tuple[Triangle, ...]
    parallelograms: tuple[Parallelogram, ...]
    maps: tuple[AffineMap, ...]

    def covers(self, p, tol: float = 0.0) -> bool:
        return any(m.contains(p, tol) for m in self.parallelograms)


def decompose(poly: SimplePolygon, direct_parallelogram: bool = True) -> Decomposition:
    """Triangulate, split each triangle in three, and attach unit-square maps.

    A polygon that already is a parallelogram is kept as a single piece unless
    ``direct_parallelogram`` is False.
    """
    tris = triangulate(poly)
    if direct_parallelogram and is_parallelogram(poly):
        v0, v1, _, v3 = poly.vertices
        pieces = [Parallelogram(v0, (v1.x - v0.x, v1.y - v0.y), (v3.x - v0.x, v3.y - v0.y))]
    else:
        pieces = [m for t in tris for m in triangle_to_parallelograms(t)]
    maps = [parallelogram_to_unit_square(m) for m in pieces]
    return Decomposition(poly, tuple(tris), tuple(pieces), tuple(maps))


def piece_square(d: Decomposition, j: int, h: Homothet) -> AxisRect:
    """Image of piece ``j`` scaled by ``h`` under that piece's map: a square of side ``h.scale``."""
    ox, oy = d.maps[j](h(d.parallelograms[j].origin))
    a = h.scale
    return AxisRect(ox, oy, ox + a, oy + a)


@dataclass
class MultiRoundReport:
    round: int
    homothet: Homothet
    already_hit: bool
    pieces_fed: list[int] = field(default_factory=list)
    added_points: list[int] = field(default_factory=list)
    sub_reports: dict[int, RoundReport] = field(default_factory=dict)
    fallback_point_used: bool = False

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "object": {"scale": self.homothet.scale, "tx": self.homothet.translation[0], "ty": self.homothet.translation[1]},
            "already_hit": self.already_hit,
            "pieces_fed": list(self.pieces_fed),
            "added_points": list(self.added_points),
            "sub_reports": {str(j): r.to_dict() for j, r in self.sub_reports.items()},
            "fallback_point_used": self.fallback_point_used,
        }


@dataclass(eq=False)
class MultiHitterState:
    decomposition: Decomposition
    points: np.ndarray
    trees: list[BBDTree]
    sub_states: list[HitterState]
    hitting_set: list[int] = field(default_factory=list)
    in_h: Optional[np.ndarray] = None
    round: int = 0
    log: list[MultiRoundReport] = field(default_factory=list)

    def contains_mask(self, h: Homothet, xy: Optional[np.ndarray] = None) -> np.ndarray:
        xy = self.points if xy is None else xy
        local = (xy - np.asarray(h.translation)) / h.scale
        return points_in_polygon(local, self.decomposition.polygon)

    def hits(self, h: Homothet) -> bool:
        if not self.hitting_set:
            return False
        return bool(self.contains_mask(h, self.points[self.hitting_set]).any())


def init_multi(points, poly: SimplePolygon, direct_parallelogram: bool = True) -> MultiHitterState:
    xy = np.array(points, dtype=float).reshape(-1, 2)
    d = decompose(poly, direct_parallelogram)
    trees = [build(m.apply(xy)) for m in d.maps]
    subs = [online.init(t) for t in trees]
    return MultiHitterState(d, xy, trees, subs, in_h=np.zeros(len(xy), dtype=bool))


def process_homothet(state: MultiHitterState, h: Homothet) -> MultiRoundReport:
    """Serve one homothet: feed every non-empty piece to its square hitter."""
    if not isinstance(h, Homothet):
        h = Homothet(*h)
    inside = state.contains_mask(h)
    if not inside.any():
        raise InfeasibleObject()
    state.round += 1
    if (state.in_h & inside).any():
        rep = MultiRoundReport(state.round, h, True)
        state.log.append(rep)
        return rep

    rep = MultiRoundReport(state.round, h, False)
    for j, sub in enumerate(state.sub_states):
        sq = piece_square(state.decomposition, j, h)
        if not sq.mask(sub.tree.points).any():
            continue
        rep.pieces_fed.append(j)
        rep.sub_reports[j] = online.process(sub, sq)

    # union in piece order
    for j in rep.pieces_fed:
        for pid in state.sub_states[j].hitting_set:
            if not state.in_h[pid]:
                state.in_h[pid] = True
                state.hitting_set.append(pid)
                rep.added_points.append(pid)
    if not (state.in_h & inside).any():
        # only reachable through rounding in the piece maps
        pid = int(np.flatnonzero(inside)[0])
        state.in_h[pid] = True
        state.hitting_set.append(pid)
        rep.added_points.append(pid)
        rep.fallback_point_used = True
    state.log.append(rep)
    return rep
