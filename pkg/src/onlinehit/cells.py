"""Cells ``r_out minus r_in`` and the two membership conventions used on them.

Hitting and crossing tests are closed: the cell is ``r_out`` minus the open
interior of ``r_in``.  Point assignment to tree nodes is half-open: a box owns
``[x_lo, x_hi) x [y_lo, y_hi)``, except that the upper edges of the bounding
square (``closure``) are kept, so that assignment is a function on the closed
root square.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import AxisRect, GeometryError, Point, aspect_ratio

__all__ = ["Cell", "in_halfopen", "mask_halfopen", "is_sticky", "is_sticky_grid", "halves"]


@dataclass(frozen=True)
class Cell:
    r_out: AxisRect
    r_in: Optional[AxisRect] = None

    def __post_init__(self):
        if self.r_in is not None:
            if not self.r_out.contains_rect(self.r_in) or self.r_in == self.r_out:
                raise GeometryError("r_in must be a proper sub-box of r_out")

    @property
    def area(self) -> float:
        a = self.r_out.area
        return a - self.r_in.area if self.r_in is not None else a

    def vertices(self) -> list[Point]:
        vs = list(self.r_out.corners())
        if self.r_in is not None:
            vs.extend(self.r_in.corners())
        return vs

    def contains(self, p) -> bool:
        """Closed membership: boundary of ``r_in`` belongs to the cell."""
        if not self.r_out.contains(p):
            return False
        r = self.r_in
        if r is None:
            return True
        return not (r.x_lo < p[0] < r.x_hi and r.y_lo < p[1] < r.y_hi)

    def intersects(self, rect: AxisRect) -> bool:
        """Closed cell against a closed rectangle."""
        if not self.r_out.intersects(rect):
            return False
        if self.r_in is None:
            return True
        clip = AxisRect(
            max(rect.x_lo, self.r_out.x_lo),
            max(rect.y_lo, self.r_out.y_lo),
            min(rect.x_hi, self.r_out.x_hi),
            min(rect.y_hi, self.r_out.y_hi),
        )
        return not self.r_in.interior_contains_rect(clip)

    def owns(self, p, closure: Optional[AxisRect] = None) -> bool:
        """Half-open membership used for point assignment."""
        if not in_halfopen(self.r_out, p, closure):
            return False
        return self.r_in is None or not in_halfopen(self.r_in, p, closure)

    def owns_mask(self, xy: np.ndarray, closure: Optional[AxisRect] = None) -> np.ndarray:
        m = mask_halfopen(self.r_out, xy, closure)
        if self.r_in is not None:
            m &= ~mask_halfopen(self.r_in, xy, closure)
        return m


def in_halfopen(box: AxisRect, p, closure: Optional[AxisRect] = None) -> bool:
    x, y = p[0], p[1]
    if not (box.x_lo <= x <= box.x_hi and box.y_lo <= y <= box.y_hi):
        return False
    if x == box.x_hi and not (closure is not None and x == closure.x_hi):
        return False
    if y == box.y_hi and not (closure is not None and y == closure.y_hi):
        return False
    return True


def mask_halfopen(box: AxisRect, xy: np.ndarray, closure: Optional[AxisRect] = None) -> np.ndarray:
    x = xy[:, 0]
    y = xy[:, 1]
    if closure is not None and box.x_hi == closure.x_hi:
        mx = (x >= box.x_lo) & (x <= box.x_hi)
    else:
        mx = (x >= box.x_lo) & (x < box.x_hi)
    if closure is not None and box.y_hi == closure.y_hi:
        my = (y >= box.y_lo) & (y <= box.y_hi)
    else:
        my = (y >= box.y_lo) & (y < box.y_hi)
    return mx & my


def is_sticky(r_in: AxisRect, r_out: AxisRect) -> bool:
    """Every gap between parallel sides is 0 or at least the matching side of ``r_in``."""
    w, h = r_in.width, r_in.height
    gaps = (
        (r_in.x_lo - r_out.x_lo, w),
        (r_out.x_hi - r_in.x_hi, w),
        (r_in.y_lo - r_out.y_lo, h),
        (r_out.y_hi - r_in.y_hi, h),
    )
    return all(g == 0 or g >= side for g, side in gaps)


def is_sticky_grid(r_in: AxisRect, r_out: AxisRect) -> bool:
    """Stickiness through the 3x3 grid of translates of ``r_in``.

    Each translate must lie inside ``r_out`` or miss its interior.
    """
    w, h = r_in.width, r_in.height
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            c = AxisRect(r_in.x_lo + dx * w, r_in.y_lo + dy * h, r_in.x_hi + dx * w, r_in.y_hi + dy * h)
            inside = r_out.contains_rect(c)
            apart = (
                c.x_hi <= r_out.x_lo
                or c.x_lo >= r_out.x_hi
                or c.y_hi <= r_out.y_lo
                or c.y_lo >= r_out.y_hi
            )
            if not (inside or apart):
                return False
    return True


def halves(box: AxisRect) -> tuple[AxisRect, AxisRect, int, float]:
    """Midpoint split across the longer side; a square is cut by a vertical line."""
    if box.width >= box.height:
        xm = (box.x_lo + box.x_hi) / 2
        return AxisRect(box.x_lo, box.y_lo, xm, box.y_hi), AxisRect(xm, box.y_lo, box.x_hi, box.y_hi), 0, xm
    ym = (box.y_lo + box.y_hi) / 2
    return AxisRect(box.x_lo, box.y_lo, box.x_hi, ym), AxisRect(box.x_lo, ym, box.x_hi, box.y_hi), 1, ym


def cell_invariant_errors(cell: Cell) -> list[str]:
    errs = []
    try:
        if aspect_ratio(cell.r_out) > 3:
            errs.append("aspect ratio of r_out exceeds 3")
    except GeometryError:
        errs.append("degenerate r_out")
    if cell.r_in is not None:
        try:
            if aspect_ratio(cell.r_in) > 3:
                errs.append("aspect ratio of r_in exceeds 3")
        except GeometryError:
            errs.append("degenerate r_in")
        if not is_sticky_grid(cell.r_in, cell.r_out):
            errs.append("r_in is not sticky in r_out")
    return errs
