import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from onlinehit.bbd import (
    DEPTH_OFFSET,
    DEPTH_SLOPE,
    NODE_FACTOR,
    BBDError,
    BBDNode,
    BBDTree,
    build,
    dump_tree,
    fair_split,
    locate_point,
    shrink,
    validate,
)
from onlinehit.cells import Cell, halves, is_sticky, is_sticky_grid
from onlinehit.geometry import AxisRect, GeometryError

from oracles import dyadic_points


def hand_tree(points, root, children):
    """Two-level tree: ``root`` box with two child cells, one point list per child."""
    xy = np.array(points, dtype=float)
    (ca, ia), (cb, ib) = children
    nodes = [
        BBDNode(0, Cell(root), -1, 0, np.arange(len(xy)), (1, 2), "split"),
        BBDNode(1, ca, 0, 1, np.array(ia, dtype=np.intp)),
        BBDNode(2, cb, 0, 1, np.array(ib, dtype=np.intp)),
    ]
    leaf = np.empty(len(xy), dtype=np.intp)
    leaf[ia] = 1
    leaf[ib] = 2
    return BBDTree(xy, root, nodes, leaf)


# -- cells and stickiness ------------------------------------------------------


def test_cell_requires_proper_inner_box():
    with pytest.raises(GeometryError):
        Cell(AxisRect(0, 0, 1, 1), AxisRect(0, 0, 1, 1))
    with pytest.raises(GeometryError):
        Cell(AxisRect(0, 0, 1, 1), AxisRect(0.5, 0.5, 1.5, 1))


def test_stickiness_examples():
    out = AxisRect(0, 0, 9, 9)
    assert not is_sticky(AxisRect(1, 3, 4, 6), out)
    assert not is_sticky_grid(AxisRect(1, 3, 4, 6), out)
    assert is_sticky(AxisRect(3, 3, 6, 6), out)
    assert is_sticky_grid(AxisRect(3, 3, 6, 6), out)
    assert is_sticky(AxisRect(0, 3, 3, 6), out)


def test_stickiness_characterisations_agree():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        ox = np.sort(rng.integers(0, 17, size=2))
        oy = np.sort(rng.integers(0, 17, size=2))
        if ox[0] == ox[1] or oy[0] == oy[1]:
            continue
        ix = np.sort(rng.integers(ox[0], ox[1] + 1, size=2))
        iy = np.sort(rng.integers(oy[0], oy[1] + 1, size=2))
        if ix[0] == ix[1] or iy[0] == iy[1]:
            continue
        out = AxisRect(*(float(v) for v in (ox[0], oy[0], ox[1], oy[1])))
        inn = AxisRect(*(float(v) for v in (ix[0], iy[0], ix[1], iy[1])))
        assert is_sticky(inn, out) == is_sticky_grid(inn, out)


def test_halves_tie_splits_vertically():
    lo, hi, axis, mid = halves(AxisRect(0, 0, 4, 4))
    assert axis == 0 and mid == 2
    assert lo == AxisRect(0, 0, 2, 4) and hi == AxisRect(2, 0, 4, 4)


# -- node operations -----------------------------------------------------------


def test_fair_split_examples():
    a, b = fair_split(Cell(AxisRect(0, 0, 4, 2)))
    assert (a.r_out, b.r_out) == (AxisRect(0, 0, 2, 2), AxisRect(2, 0, 4, 2))
    a, b = fair_split(Cell(AxisRect(0, 0, 2, 4)))
    assert (a.r_out, b.r_out) == (AxisRect(0, 0, 2, 2), AxisRect(0, 2, 2, 4))


def test_fair_split_rejects_cut_inner_box():
    with pytest.raises(BBDError):
        fair_split(Cell(AxisRect(0, 0, 4, 4), AxisRect(1, 1, 3, 3)))


def test_shrink_examples():
    out = AxisRect(0, 0, 9, 9)
    a, b = shrink(Cell(out), AxisRect(3, 3, 6, 6))
    assert a == Cell(out, AxisRect(3, 3, 6, 6))
    assert b == Cell(AxisRect(3, 3, 6, 6))
    a, b = shrink(Cell(out, AxisRect(4, 4, 5, 5)), AxisRect(3, 3, 6, 6))
    assert a == Cell(out, AxisRect(3, 3, 6, 6))
    assert b == Cell(AxisRect(3, 3, 6, 6), AxisRect(4, 4, 5, 5))
    with pytest.raises(BBDError):
        shrink(Cell(out), out)


def test_shrink_rejects_non_sticky_box():
    with pytest.raises(BBDError, match="sticky"):
        shrink(Cell(AxisRect(0, 0, 9, 9)), AxisRect(1, 3, 4, 6))


# -- build ---------------------------------------------------------------------


def test_single_point_tree():
    t = build([(0.5, 0.5)])
    assert t.node_count == 1 and t.depth == 0
    assert locate_point(t, (0.5, 0.5)).id == 0


def test_two_point_tree():
    t = build([(0, 0), (1, 1)])
    assert t.depth >= 1
    leaves = list(t.leaves())
    assert sorted(len(v.point_ids) for v in leaves if len(v.point_ids)) == [1, 1]
    assert validate(t).ok


def test_build_errors():
    with pytest.raises(BBDError, match="empty point set"):
        build(np.zeros((0, 2)))
    with pytest.raises(BBDError, match="duplicate point"):
        build([(0, 0), (1, 1), (0, 0)])


def test_thousand_points_validate():
    xy = dyadic_points(np.random.default_rng(0), 1000, 16)
    t = build(xy)
    rep = validate(t, exhaustive=True)
    assert rep.ok, rep.lines()
    assert t.node_count <= NODE_FACTOR * 1000
    assert t.depth <= DEPTH_SLOPE * math.log2(1001) + DEPTH_OFFSET


def test_build_is_deterministic():
    xy = dyadic_points(np.random.default_rng(2), 300, 12)
    assert dump_tree(build(xy)) == dump_tree(build(xy.copy()))
    assert [v.ext for v in build(xy).nodes] == [v.ext for v in build(xy).nodes]


def test_root_is_bounding_square_and_points_frozen():
    xy = dyadic_points(np.random.default_rng(1), 50, 10)
    t = build(xy)
    assert t.root.cell == Cell(t.bounding_square)
    assert t.bounding_square.width == t.bounding_square.height
    with pytest.raises(ValueError):
        t.points[0, 0] = 7.0


@given(st.lists(st.tuples(st.integers(0, 63), st.integers(0, 63)), min_size=1, max_size=80, unique=True))
def test_built_trees_validate(pts):
    xy = np.array(pts, dtype=float) / 64
    rep = validate(build(xy), exhaustive=True)
    assert rep.ok, rep.lines()


@given(
    st.lists(st.tuples(st.integers(-3, 3), st.integers(-40, 40)), min_size=2, max_size=60, unique=True),
    st.integers(0, 30),
)
def test_leaf_assignment_and_sum(pts, shift):
    xy = np.array(pts, dtype=float) * 2.0**-shift
    t = build(xy)
    leaves = list(t.leaves())
    assert sum(len(v.point_ids) for v in leaves) == len(xy)
    for i, p in enumerate(xy):
        assert t.leaf_of_point[i] == locate_point(t, p).id


def test_locate_matches_linear_leaf_scan():
    rng = np.random.default_rng(4)
    for _ in range(30):
        xy = dyadic_points(rng, int(rng.integers(2, 80)), 6)
        t = build(xy, compute_extremal=False)
        sq = t.bounding_square
        q = sq.x_lo + rng.integers(0, 65, size=(50, 2)) / 64 * sq.width
        q[:, 1] = sq.y_lo + (q[:, 1] - sq.x_lo)
        for p in q:
            owners = [v.id for v in t.leaves() if v.cell.owns(p, sq)]
            assert owners == [locate_point(t, p).id]


def test_locate_boundary_goes_to_higher_cell():
    t = hand_tree(
        [(1, 1), (3, 1)],
        AxisRect(0, 0, 4, 4),
        [(Cell(AxisRect(0, 0, 2, 4)), [0]), (Cell(AxisRect(2, 0, 4, 4)), [1])],
    )
    assert locate_point(t, (2, 1)).id == 2
    with pytest.raises(BBDError, match="outside root cell"):
        locate_point(t, (5, 1))


# -- validator on hand-built trees ---------------------------------------------


def test_validator_accepts_hand_built_tree():
    t = hand_tree(
        [(0.5, 0.5), (1.5, 0.5)],
        AxisRect(0, 0, 2, 2),
        [(Cell(AxisRect(0, 0, 1, 2)), [0]), (Cell(AxisRect(1, 0, 2, 2)), [1])],
    )
    rep = validate(t, exhaustive=True)
    assert rep.ok, rep.lines()


def test_validator_flags_non_sticky_inner_box():
    out = AxisRect(0, 0, 9, 9)
    inn = AxisRect(1, 3, 4, 6)
    t = hand_tree([(0.5, 0.5), (2, 4)], out, [(Cell(out, inn), [0]), (Cell(inn), [1])])
    rep = validate(t)
    assert not rep.checks["stickiness"].ok
    assert rep.checks["stickiness"].node == 1
    assert rep.checks["laminar_partition"].ok


def test_validator_accepts_flush_sticky_box():
    out = AxisRect(0, 0, 9, 9)
    inn = AxisRect(3, 3, 6, 6)
    t = hand_tree([(0.5, 0.5), (4, 4)], out, [(Cell(out, inn), [0]), (Cell(inn), [1])])
    assert validate(t).checks["stickiness"].ok


def test_validator_flags_bad_aspect_and_overlap():
    t = hand_tree(
        [(0.5, 0.5), (6, 1)],
        AxisRect(0, 0, 8, 8),
        [(Cell(AxisRect(0, 0, 8, 2)), [0]), (Cell(AxisRect(0, 0, 8, 8), AxisRect(0, 0, 8, 2)), [1])],
    )
    rep = validate(t)
    assert not rep.checks["aspect_ratio"].ok


def test_validator_flags_fat_leaf_and_gaps():
    t = hand_tree(
        [(0.5, 0.5), (0.6, 0.5), (1.5, 1.5)],
        AxisRect(0, 0, 2, 2),
        [(Cell(AxisRect(0, 0, 1, 2)), [0, 1]), (Cell(AxisRect(1, 0, 2, 1)), [2])],
    )
    rep = validate(t)
    assert not rep.checks["leaf_points"].ok
    assert not rep.checks["laminar_partition"].ok
    assert not rep.checks["point_assignment"].ok


def test_validator_bounds_use_constants():
    t = build(dyadic_points(np.random.default_rng(9), 64, 10))
    assert validate(t).ok
    rep = validate(t, depth_slope=0, depth_offset=0, node_factor=0.5)
    assert not rep.checks["depth_bound"].ok and not rep.checks["node_count_bound"].ok


def test_dump_format():
    t = build([(0.25, 0.25), (0.75, 0.75)])
    lines = dump_tree(t).splitlines()
    assert len(lines) == t.node_count
    first = lines[0].split(" ")
    assert first[0] == "0" and first[1] == "-1" and first[3] == "none" and first[4] == "2"
    sq = t.bounding_square
    assert first[2] == f"({sq.x_lo!r},{sq.y_lo!r},{sq.x_hi!r},{sq.y_hi!r})"
    ids = [int(s.split()[0]) for s in lines]
    assert ids == list(range(t.node_count))
