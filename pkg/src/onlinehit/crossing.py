"""Crossing between an axis-aligned rectangle and tree cells."""

from __future__ import annotations

from .bbd import BBDTree
from .cells import Cell
from .geometry import AxisRect, Point

__all__ = ["cell_vertices", "crosses", "crossed_nodes"]


def cell_vertices(c: Cell) -> list[Point]:
    return c.vertices()


def crosses(r: AxisRect, c: Cell) -> bool:
    """``r`` meets ``c`` while neither holds a vertex of the other.

    The cell is closed (``r_out`` minus the open interior of ``r_in``) and
    vertex containment is closed on both sides.
    """
    if not c.intersects(r):
        return False
    if any(c.contains(q) for q in r.corners()):
        return False
    return not any(r.contains(q) for q in c.vertices())


def crossed_nodes(tree: BBDTree, r: AxisRect) -> list[int]:
    """Pre-order ids of every node whose cell ``r`` crosses.

    Subtrees whose cell misses ``r`` are pruned; child cells lie inside the
    parent cell, so nothing below can meet ``r`` either.  Subtrees whose
    outer box lies inside ``r`` are pruned too: ``r`` holds every vertex of
    every cell below.
    """
    nodes = tree.nodes
    out = []
    stack = [0]
    while stack:
        v = nodes[stack.pop()]
        if r.contains_rect(v.cell.r_out) or not v.cell.intersects(r):
            continue
        if crosses(r, v.cell):
            out.append(v.id)
        if v.children is not None:
            stack.append(v.children[1])
            stack.append(v.children[0])
    return out
