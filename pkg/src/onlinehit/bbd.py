"""Balanced box decomposition tree over a planar point set.

Construction uses midpoint boxes only: every outer and inner box is obtained
from the bounding square by repeated halving across the longer side, so all
boxes have aspect ratio 1 or 2 and any inner box sits on the grid of its own
size inside its outer box, which makes it sticky.

At a node holding ``m >= 2`` points we walk down the midpoint hierarchy of
``r_out``, always into the heavier half, until the current box holds at most
``2m/3`` of the cell's points (a centroid box).  The node is then divided by
one box ``R`` into ``r_out \\ R`` and ``R \\ r_in``:

* no inner box: ``R`` is the centroid box;
* inner box inside the centroid box: ``R`` is the centroid box;
* otherwise ``R`` is the last box on the walk still containing ``r_in``, or
  the half of ``r_out`` holding ``r_in`` when the walk leaves it at once.

When ``R`` is a half of ``r_out`` the division is a fair split along the
midline; otherwise it is a shrink.  A cell whose inner box is exactly one half
of its outer box is stored as the other half with no inner box (same region).
Within three levels the point count drops to ``2/3``, so the depth is
``O(log n)``; a node that does not split its points into two non-empty parts
is followed by one that does, so the size is ``O(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .cells import Cell, cell_invariant_errors, halves, is_sticky, is_sticky_grid, mask_halfopen
from .extremal import ext_cell
from .geometry import AxisRect, GeometryError, aspect_ratio

__all__ = [
    "BBDError",
    "BBDNode",
    "BBDTree",
    "CheckResult",
    "ValidationReport",
    "DEPTH_SLOPE",
    "DEPTH_OFFSET",
    "NODE_FACTOR",
    "bounding_square",
    "build",
    "validate",
    "fair_split",
    "shrink",
    "locate_point",
    "dump_tree",
]

# Regression bounds: depth <= DEPTH_SLOPE * log2(n + 1) + DEPTH_OFFSET and
# node_count <= NODE_FACTOR * n.  Measured over uniform, clustered, grid and
# ring-nest point sets (n = 1 .. 16384, 20 seeds): depth never exceeded
# 1.5 * log2(n + 1) + 1, node_count / n never exceeded 2.82.
DEPTH_SLOPE = 2.0
DEPTH_OFFSET = 2.0
NODE_FACTOR = 3.0


class BBDError(GeometryError):
    pass


@dataclass(eq=False)
class BBDNode:
    id: int
    cell: Cell
    parent: int
    depth: int
    point_ids: np.ndarray
    children: Optional[tuple[int, int]] = None
    kind: str = "leaf"
    ext: tuple[int, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    @property
    def point_count(self) -> int:
        return len(self.point_ids)


@dataclass(eq=False)
class BBDTree:
    points: np.ndarray
    bounding_square: AxisRect
    nodes: list[BBDNode]
    leaf_of_point: np.ndarray = field(repr=False)

    @property
    def root(self) -> BBDNode:
        return self.nodes[0]

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def depth(self) -> int:
        return max(v.depth for v in self.nodes)

    def sibling(self, v: int) -> Optional[int]:
        p = self.nodes[v].parent
        if p < 0:
            return None
        a, b = self.nodes[p].children
        return b if a == v else a

    def leaves(self) -> Iterator[BBDNode]:
        return (v for v in self.nodes if v.children is None)

    def path_to(self, p) -> list[int]:
        """Node ids from the root to the leaf owning ``p`` (half-open convention)."""
        if not self.bounding_square.contains(p):
            raise BBDError("outside root cell")
        closure = self.bounding_square
        path = [0]
        v = self.nodes[0]
        while v.children is not None:
            a, b = v.children
            v = self.nodes[a] if self.nodes[a].cell.owns(p, closure) else self.nodes[b]
            path.append(v.id)
        return path

    def ancestors(self, v: int) -> list[int]:
        """Ids from the root down to ``v`` inclusive."""
        out = []
        while v >= 0:
            out.append(v)
            v = self.nodes[v].parent
        out.reverse()
        return out


def bounding_square(xy: np.ndarray) -> AxisRect:
    """Power-of-two square holding all points strictly below its upper edges.

    The lower-left corner is a multiple of half the side, so every midpoint
    box corner is an exact multiple of its own size.
    """
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    extent = float(max(hi - lo))
    side = 1.0
    if extent > 0:
        side = 2.0 ** math.ceil(math.log2(2 * extent))
        while side < 2 * extent:
            side *= 2
        while side / 2 >= 2 * extent:
            side /= 2
    half = side / 2
    x0 = math.floor(float(lo[0]) / half) * half
    y0 = math.floor(float(lo[1]) / half) * half
    sq = AxisRect(x0, y0, x0 + side, y0 + side)
    if not (hi[0] < sq.x_hi and hi[1] < sq.y_hi):
        raise BBDError("coordinates too large to bound exactly")
    return sq


def _settle(box: AxisRect, inner: Optional[AxisRect]) -> Cell:
    # an inner box equal to one half leaves the other half as a plain box
    if inner is None:
        return Cell(box)
    lo, hi, _, _ = halves(box)
    if inner == lo:
        return Cell(hi)
    if inner == hi:
        return Cell(lo)
    return Cell(box, inner)


def _divide(outer: AxisRect, inner: Optional[AxisRect], box: AxisRect) -> tuple[str, Cell, Cell]:
    """Children ``(outer \\ box, box \\ inner)``; a midline box makes it a fair split."""
    lo, hi, _, _ = halves(outer)
    if box == lo:
        return "split", _settle(lo, inner), Cell(hi)
    if box == hi:
        return "split", Cell(lo), _settle(hi, inner)
    return "shrink", Cell(outer, box), _settle(box, inner)


def fair_split(cell: Cell) -> tuple[Cell, Cell]:
    """Cut ``r_out`` through the midpoint of its longer side (vertical line on ties)."""
    lo, hi, _, _ = halves(cell.r_out)
    inner = cell.r_in
    if inner is None:
        children = (Cell(lo), Cell(hi))
    elif lo.contains_rect(inner) and inner != lo:
        children = (_settle(lo, inner), Cell(hi))
    elif hi.contains_rect(inner) and inner != hi:
        children = (Cell(lo), _settle(hi, inner))
    else:
        raise BBDError("split line cuts r_in")
    for c in children:
        errs = cell_invariant_errors(c)
        if errs:
            raise BBDError(f"fair split breaks a child cell: {errs[0]}")
    return children


def shrink(cell: Cell, box: AxisRect) -> tuple[Cell, Cell]:
    """Divide ``cell`` by an intermediate box into ``r_out \\ box`` and ``box \\ r_in``."""
    out, inner = cell.r_out, cell.r_in
    if not out.contains_rect(box) or box == out:
        raise BBDError("shrink box must be a proper sub-box of r_out")
    if inner is not None and (not box.contains_rect(inner) or box == inner):
        raise BBDError("shrink box must properly contain r_in")
    if aspect_ratio(box) > 3:
        raise BBDError("shrink box aspect ratio exceeds 3")
    if not is_sticky(box, out):
        raise BBDError("shrink box is not sticky in r_out")
    if inner is not None and not is_sticky(inner, box):
        raise BBDError("r_in is not sticky in the shrink box")
    return Cell(out, box), Cell(box, inner)


def _centroid_walk(outer: AxisRect, xs: np.ndarray, ys: np.ndarray, ids: np.ndarray) -> list[AxisRect]:
    m = len(ids)
    box = outer
    cur = ids
    path = [outer]
    while True:
        lo, hi, axis, mid = halves(box)
        if not (box.x_lo < mid < box.x_hi if axis == 0 else box.y_lo < mid < box.y_hi):
            raise BBDError("points too close to separate in floating point")
        coord = xs[cur] if axis == 0 else ys[cur]
        below = coord < mid
        n_lo = int(np.count_nonzero(below))
        if 2 * n_lo >= len(cur):
            box, cur = lo, cur[below]
        else:
            box, cur = hi, cur[~below]
        path.append(box)
        if 3 * len(cur) <= 2 * m:
            return path


def build(points, *, compute_extremal: bool = True) -> BBDTree:
    """Build the tree over ``points`` (an ``(n, 2)`` array or a sequence of pairs)."""
    xy = np.array(points, dtype=float).reshape(-1, 2)
    if len(xy) == 0:
        raise BBDError("empty point set")
    if not np.all(np.isfinite(xy)):
        raise BBDError("non-finite coordinate")
    if len(np.unique(xy, axis=0)) != len(xy):
        raise BBDError("duplicate point")
    xy.setflags(write=False)
    xs = np.ascontiguousarray(xy[:, 0])
    ys = np.ascontiguousarray(xy[:, 1])
    root_box = bounding_square(xy)
    nodes: list[BBDNode] = []
    leaf_of = np.full(len(xy), -1, dtype=np.intp)

    def grow(cell: Cell, ids: np.ndarray, parent: int, depth: int) -> int:
        node = BBDNode(len(nodes), cell, parent, depth, ids)
        nodes.append(node)
        if len(ids) <= 1:
            leaf_of[ids] = node.id
            return node.id
        outer, inner = cell.r_out, cell.r_in
        path = _centroid_walk(outer, xs, ys, ids)
        if inner is None or path[-1].contains_rect(inner):
            box = path[-1]
        else:
            last = max(j for j, b in enumerate(path) if b.contains_rect(inner))
            if last >= 1:
                box = path[last]
            else:
                lo, hi, _, _ = halves(outer)
                box = lo if lo.contains_rect(inner) else hi
        kind, a, b = _divide(outer, inner, box)
        in_box = mask_halfopen(box, xy[ids])
        if kind == "split" and box == halves(outer)[0]:
            ids_a, ids_b = ids[in_box], ids[~in_box]
        else:
            ids_a, ids_b = ids[~in_box], ids[in_box]
        node.kind = kind
        ca = grow(a, ids_a, node.id, depth + 1)
        cb = grow(b, ids_b, node.id, depth + 1)
        node.children = (ca, cb)
        return node.id

    grow(Cell(root_box), np.arange(len(xy), dtype=np.intp), -1, 0)
    tree = BBDTree(xy, root_box, nodes, leaf_of)
    if compute_extremal:
        for v in nodes:
            v.ext = ext_cell(v.cell, xy, v.point_ids).point_ids
    return tree


def locate_point(tree: BBDTree, p) -> BBDNode:
    return tree.nodes[tree.path_to(p)[-1]]


# -- validation ---------------------------------------------------------------


@dataclass
class CheckResult:
    ok: bool = True
    node: Optional[int] = None
    detail: str = ""

    def fail(self, node: Optional[int], detail: str) -> None:
        if self.ok:
            self.ok, self.node, self.detail = False, node, detail


@dataclass
class ValidationReport:
    checks: dict[str, CheckResult]
    depth: int
    node_count: int
    n: int

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def lines(self) -> list[str]:
        out = []
        for name, c in self.checks.items():
            tag = "PASS" if c.ok else "FAIL"
            extra = "" if c.ok else f"  node={c.node} {c.detail}"
            out.append(f"{tag}  {name}{extra}")
        out.append(f"n={self.n} nodes={self.node_count} depth={self.depth}")
        return out


def _aspect_ok(r: AxisRect) -> bool:
    w, h = r.width, r.height
    return w > 0 and h > 0 and w <= 3 * h and h <= 3 * w


def _exact_area(c: Cell) -> Fraction:
    def a(r):
        return (Fraction(r.x_hi) - Fraction(r.x_lo)) * (Fraction(r.y_hi) - Fraction(r.y_lo))

    return a(c.r_out) - (a(c.r_in) if c.r_in is not None else 0)


def _samples(cells: list[Cell], frame: AxisRect) -> np.ndarray:
    # every breakpoint plus the midpoints between them hits each face of the
    # arrangement of box edges, so this grid decides the partition exactly
    def axis(lo_attr, hi_attr, lo, hi):
        cuts = {lo, hi}
        for c in cells:
            for r in (c.r_out, c.r_in):
                if r is not None:
                    for v in (getattr(r, lo_attr), getattr(r, hi_attr)):
                        if lo <= v <= hi:
                            cuts.add(v)
        cuts = sorted(cuts)
        mids = [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
        return np.array(cuts + mids)

    gx = axis("x_lo", "x_hi", frame.x_lo, frame.x_hi)
    gy = axis("y_lo", "y_hi", frame.y_lo, frame.y_hi)
    X, Y = np.meshgrid(gx, gy)
    return np.column_stack([X.ravel(), Y.ravel()])


def _region_within(inner: Cell, outer: Cell) -> bool:
    """Region of ``inner`` inside region of ``outer`` (up to boundaries)."""
    if not outer.r_out.contains_rect(inner.r_out):
        return False
    hole = outer.r_in
    if hole is None:
        return True
    if inner.r_in is not None and inner.r_in.contains_rect(hole):
        return True
    return _overlap(hole, inner.r_out) is None


def _overlap(a: AxisRect, b: AxisRect) -> Optional[AxisRect]:
    x0, y0 = max(a.x_lo, b.x_lo), max(a.y_lo, b.y_lo)
    x1, y1 = min(a.x_hi, b.x_hi), min(a.y_hi, b.y_hi)
    if x0 < x1 and y0 < y1:
        return AxisRect(x0, y0, x1, y1)
    return None


def _regions_disjoint(a: Cell, b: Cell) -> bool:
    common = _overlap(a.r_out, b.r_out)
    if common is None:
        return True
    return any(h is not None and h.contains_rect(common) for h in (a.r_in, b.r_in))


def _owned_rows(tree: BBDTree) -> np.ndarray:
    """Half-open ownership of every (node, listed point) pair, vectorised."""
    nodes = tree.nodes
    counts = np.array([len(v.point_ids) for v in nodes])
    rows = np.repeat(np.arange(len(nodes)), counts)
    ids = np.concatenate([v.point_ids for v in nodes])
    big = tree.bounding_square
    out = np.array([tuple(v.cell.r_out) for v in nodes], dtype=float)
    nan4 = (np.nan,) * 4
    inn = np.array([tuple(v.cell.r_in) if v.cell.r_in is not None else nan4 for v in nodes], dtype=float)
    x = tree.points[ids, 0]
    y = tree.points[ids, 1]

    def inside(boxes):
        b = boxes[rows]
        up_x = np.where(b[:, 2] == big.x_hi, x <= b[:, 2], x < b[:, 2])
        up_y = np.where(b[:, 3] == big.y_hi, y <= b[:, 3], y < b[:, 3])
        return (x >= b[:, 0]) & up_x & (y >= b[:, 1]) & up_y

    return inside(out) & ~inside(inn), rows


def validate(
    tree: BBDTree,
    depth_slope: float = DEPTH_SLOPE,
    depth_offset: float = DEPTH_OFFSET,
    node_factor: float = NODE_FACTOR,
    exhaustive: bool = False,
) -> ValidationReport:
    """Check every structural property of ``tree`` without using the builder.

    The partition check compares exact areas and tests containment and
    disjointness of the child regions; ``exhaustive=True`` additionally
    samples every face of the arrangement of box edges at each internal node.
    """
    names = (
        "aspect_ratio",
        "stickiness",
        "laminar_partition",
        "leaf_points",
        "point_assignment",
        "binary_children",
        "depth_bound",
        "node_count_bound",
    )
    checks = {k: CheckResult() for k in names}
    nodes = tree.nodes
    xy = tree.points
    n = len(xy)
    closure = tree.bounding_square

    root = nodes[0]
    if root.cell.r_out != closure or root.cell.r_in is not None:
        checks["laminar_partition"].fail(0, "root cell is not the bounding square")
    if len(root.point_ids) != n:
        checks["point_assignment"].fail(0, "root does not hold every point")

    owned, rows = _owned_rows(tree)
    if not owned.all():
        checks["point_assignment"].fail(int(rows[np.argmin(owned)]), "a listed point lies outside the cell")

    seen_leaf = np.zeros(n, dtype=np.int64)
    for v in nodes:
        c = v.cell
        for label, r in (("r_out", c.r_out), ("r_in", c.r_in)):
            if r is not None and not _aspect_ok(r):
                checks["aspect_ratio"].fail(v.id, f"{label}={tuple(r)}")
        if c.r_in is not None:
            if not c.r_out.contains_rect(c.r_in) or c.r_in == c.r_out:
                checks["stickiness"].fail(v.id, "r_in is not a proper sub-box of r_out")
            elif not is_sticky_grid(c.r_in, c.r_out):
                checks["stickiness"].fail(v.id, f"r_in={tuple(c.r_in)} in r_out={tuple(c.r_out)}")

        ids = v.point_ids
        if v.children is None:
            if len(ids) > 1:
                checks["leaf_points"].fail(v.id, f"leaf holds {len(ids)} points")
            seen_leaf[ids] += 1
            continue
        if len(v.children) != 2:
            checks["binary_children"].fail(v.id, "internal node without exactly two children")
            continue
        a, b = (nodes[i] for i in v.children)
        if a.parent != v.id or b.parent != v.id or a.depth != v.depth + 1 or b.depth != v.depth + 1:
            checks["binary_children"].fail(v.id, "inconsistent parent/depth links")

        joined = np.concatenate([a.point_ids, b.point_ids])
        if len(joined) != len(ids) or not np.array_equal(np.sort(joined), ids):
            checks["point_assignment"].fail(v.id, "children do not partition the node's points")

        lam = checks["laminar_partition"]
        if a.cell.area + b.cell.area != c.area and _exact_area(a.cell) + _exact_area(b.cell) != _exact_area(c):
            lam.fail(v.id, "child areas do not add up")
        elif not (_region_within(a.cell, c) and _region_within(b.cell, c)):
            lam.fail(v.id, "a child region leaves the parent cell")
        elif not _regions_disjoint(a.cell, b.cell):
            lam.fail(v.id, "child regions overlap")
        elif exhaustive:
            s = _samples([c, a.cell, b.cell], c.r_out)
            in_parent = c.owns_mask(s, closure)
            in_a = a.cell.owns_mask(s, closure)
            in_b = b.cell.owns_mask(s, closure)
            if np.any(in_a & in_b) or np.any((in_a | in_b) != in_parent):
                lam.fail(v.id, "children do not tile the parent cell")

    if np.any(seen_leaf != 1):
        bad = int(np.flatnonzero(seen_leaf != 1)[0])
        checks["point_assignment"].fail(None, f"point {bad} lies in {seen_leaf[bad]} leaves")

    depth = tree.depth
    if depth > depth_slope * math.log2(n + 1) + depth_offset:
        checks["depth_bound"].fail(None, f"depth {depth} > {depth_slope}*log2({n}+1)+{depth_offset}")
    if tree.node_count > node_factor * n:
        checks["node_count_bound"].fail(None, f"{tree.node_count} nodes > {node_factor}*{n}")
    return ValidationReport(checks, depth, tree.node_count, n)


def _fmt_box(r: Optional[AxisRect]) -> str:
    if r is None:
        return "none"
    return "(" + ",".join(repr(float(v)) for v in r) + ")"


def dump_tree(tree: BBDTree) -> str:
    """One line per node in pre-order: ``id parent r_out r_in|none point_count``."""
    lines = []
    for v in tree.nodes:
        lines.append(
            f"{v.id} {v.parent} {_fmt_box(v.cell.r_out)} {_fmt_box(v.cell.r_in)} {v.point_count}"
        )
    return "\n".join(lines) + "\n"
