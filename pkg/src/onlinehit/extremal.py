"""Extremal points of rectangles and of annular tree cells."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cells import Cell
from .geometry import AxisRect, GeometryError

__all__ = ["ExtremalSet", "ext", "subdivide_cell", "ext_cell"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtremalSet:
    point_ids: tuple[int, ...]
    subrectangles: tuple[AxisRect, ...] = ()


def _extremes(ids: np.ndarray, x: np.ndarray, y: np.ndarray) -> list[int]:
    # ids ascending, so argmin/argmax (first hit) breaks ties by smallest id
    if len(ids) == 0:
        return []
    if len(ids) == 1:
        return [int(ids[0])]
    picks = (ids[np.argmin(x)], ids[np.argmax(x)], ids[np.argmin(y)], ids[np.argmax(y)])
    out: list[int] = []
    for i in picks:
        i = int(i)
        if i not in out:
            out.append(i)
    return out


def _facing_ties(ids: np.ndarray, x: np.ndarray, y: np.ndarray, axis: int) -> list[int]:
    """Both ends of the points sharing the minimum coordinate along ``axis``.

    The right-middle and top-middle blocks keep their side facing ``r_in``
    (half-open binning), so several points can share it exactly; a quadrant
    whose apex lies on that side needs the tied point on the proper end.
    """
    along, other = (x, y) if axis == 0 else (y, x)
    sel = along == along.min()
    tid, o = ids[sel], other[sel]
    return [int(tid[np.argmin(o)]), int(tid[np.argmax(o)])]


def ext(r: AxisRect, xy: np.ndarray, ids: Optional[np.ndarray] = None) -> tuple[int, ...]:
    """Min-x, max-x, min-y and max-y points of ``P`` inside the closed rectangle ``r``.

    ``ids`` restricts the candidates; it must be sorted ascending.
    """
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    if ids is None:
        ids = np.arange(len(xy))
    ids = np.asarray(ids, dtype=np.intp)
    sub = xy[ids]
    ids = ids[r.mask(sub)]
    pts = xy[ids]
    return tuple(_extremes(ids, pts[:, 0], pts[:, 1]))


def _breaks(lo: float, a: float, b: float, hi: float) -> list[tuple[float, float]]:
    return [(lo, a), (a, b), (b, hi)]


def subdivide_cell(c: Cell) -> list[AxisRect]:
    """Cut ``r_out \\ r_in`` along the four lines through the sides of ``r_in``.

    Returns the rectangles of positive area, row by row from the bottom.
    """
    if c.r_in is None:
        raise GeometryError("nothing to subdivide")
    o, i = c.r_out, c.r_in
    xs = _breaks(o.x_lo, i.x_lo, i.x_hi, o.x_hi)
    ys = _breaks(o.y_lo, i.y_lo, i.y_hi, o.y_hi)
    out = []
    for row, (y0, y1) in enumerate(ys):
        for col, (x0, x1) in enumerate(xs):
            if row == 1 and col == 1:
                continue
            if x1 > x0 and y1 > y0:
                out.append(AxisRect(x0, y0, x1, y1))
    if not 2 <= len(out) <= 8:
        log.debug("cell %s splits into %d subrectangles", c, len(out))
    return out


# block key 3*row + col -> axis of its closed side facing r_in
_FACING_AXIS = {5: 0, 7: 1}


def ext_cell(
    c: Cell,
    xy: np.ndarray,
    ids: Optional[np.ndarray] = None,
    closure: Optional[AxisRect] = None,
) -> ExtremalSet:
    """Union of ``ext`` over the subrectangles of a cell.

    Points are assigned half-open, so each one of ``P`` in the cell lands in
    exactly one subrectangle.  ``ids`` (sorted) may pass the cell's points
    directly; otherwise they are found from ``xy``.
    """
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    if ids is None:
        ids = np.flatnonzero(c.owns_mask(xy, closure))
    ids = np.asarray(ids, dtype=np.intp)
    pts = xy[ids]
    x, y = pts[:, 0], pts[:, 1]
    if c.r_in is None:
        return ExtremalSet(tuple(_extremes(ids, x, y)))

    subs = subdivide_cell(c)
    if len(ids) == 0:
        return ExtremalSet((), tuple(subs))
    i = c.r_in
    xb = (x >= i.x_lo).astype(np.int8) + (x >= i.x_hi)
    yb = (y >= i.y_lo).astype(np.int8) + (y >= i.y_hi)
    key = 3 * yb + xb
    found: list[int] = []
    for k in np.unique(key):
        sel = key == k
        picks = _extremes(ids[sel], x[sel], y[sel])
        if k in _FACING_AXIS:
            picks += _facing_ties(ids[sel], x[sel], y[sel], _FACING_AXIS[k])
        for pid in picks:
            if pid not in found:
                found.append(pid)
    return ExtremalSet(tuple(found), tuple(subs))
