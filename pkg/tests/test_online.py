import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from onlinehit import online
from onlinehit.bbd import build
from onlinehit.geometry import AxisRect
from onlinehit.online import InfeasibleObject
from onlinehit.opt import exact_min_hitting_set, reduce

from oracles import dyadic_points


def run(xy, rects, check=True):
    state = online.init(build(xy))
    for r in rects:
        if not r.mask(state.tree.points).any():
            continue
        before_h = list(state.hitting_set)
        before_a = bytes(state.active)
        rep = online.process(state, r)
        if check:
            assert online.invariant_violations(state) == []
            # monotone growth
            assert state.hitting_set[: len(before_h)] == before_h
            assert all(a <= b for a, b in zip(before_a, state.active))
            if rep.already_hit:
                assert rep.activated_nodes == [] and rep.added_points == []
    return state


def random_rects(rng, m, frame, bits=6, rho=4.0):
    s = 1 << bits
    out = []
    for _ in range(m):
        w = frame.width * float(rng.integers(1, s)) / s
        h = min(frame.height, w * (1 + float(rng.random()) * (rho - 1)))
        h = float(np.floor(h * s) / s) or w
        x0 = frame.x_lo + float(rng.integers(-s // 4, s)) / s * frame.width
        y0 = frame.y_lo + float(rng.integers(-s // 4, s)) / s * frame.height
        out.append(AxisRect(x0, y0, x0 + w, y0 + h))
    return out


def test_init_state():
    t = build([(0.25, 0.25), (0.75, 0.5)])
    s = online.init(t)
    assert s.hitting_set == [] and s.active_nodes == [] and s.round == 0
    s2 = online.init(t)
    assert s2.active == s.active and s2.hitting_set == s.hitting_set


def test_single_point_trace():
    s = online.init(build([(5, 5)]))
    rep = online.process(s, AxisRect(4, 4, 6, 6))
    assert rep.round == 1 and not rep.already_hit
    assert rep.activated_nodes == [0]
    assert rep.added_points == [0]
    assert rep.fallback_point_used is False
    rep2 = online.process(s, AxisRect(4, 4, 6, 6))
    assert rep2.already_hit and rep2.added_points == [] and rep2.activated_nodes == []


def test_first_object_adds_a_point():
    xy = dyadic_points(np.random.default_rng(0), 40, 8)
    s = online.init(build(xy))
    rep = online.process(s, AxisRect(0, 0, 0.5, 0.5))
    assert len(rep.added_points) >= 1


def test_infeasible_object_leaves_state_alone():
    s = online.init(build([(0.25, 0.25), (0.75, 0.75)]))
    with pytest.raises(InfeasibleObject, match="infeasible object"):
        online.process(s, AxisRect(0.3, 0.3, 0.4, 0.4))
    assert s.round == 0 and s.hitting_set == [] and s.active_nodes == [] and s.log == []


def test_unhit_counts_basic():
    xy = np.array([(0.25, 0.25), (0.75, 0.75)])
    s = online.init(build(xy))
    assert online.unhit_round_counts(s).tolist() == [0, 0]
    online.process(s, AxisRect(0, 0, 0.5, 0.5))
    assert online.unhit_round_counts(s).tolist() == [1, 0]


def test_unhit_counts_against_log_recount():
    rng = np.random.default_rng(3)
    xy = dyadic_points(rng, 80, 8)
    s = run(xy, random_rects(rng, 200, build(xy).bounding_square))
    counts = online.unhit_round_counts(s)
    hist = [set()]
    recount = np.zeros(len(xy), dtype=int)
    # replay H round by round from the reports
    h = set()
    for rep in s.log:
        inside = rep.object.mask(xy)
        if not (inside & np.isin(np.arange(len(xy)), list(h))).any():
            recount += inside
        h |= set(rep.added_points)
        hist.append(set(h))
    assert counts.tolist() == recount.tolist()


@given(
    st.lists(st.tuples(st.integers(0, 31), st.integers(0, 31)), min_size=1, max_size=60, unique=True),
    st.lists(st.tuples(st.integers(-4, 34), st.integers(-4, 34), st.integers(0, 20), st.integers(0, 20)),
             min_size=1, max_size=60),
)
def test_invariants_after_every_round(pts, boxes):
    xy = np.array(pts, dtype=float) / 32
    rects = [AxisRect(x / 32, y / 32, (x + w) / 32, (y + h) / 32) for x, y, w, h in boxes]
    s = run(xy, rects)
    depth = s.tree.depth
    assert online.unhit_round_counts(s).max(initial=0) <= depth + 1


def test_bound_and_accounting_on_random_runs():
    rng = np.random.default_rng(7)
    for trial in range(25):
        xy = dyadic_points(rng, int(rng.integers(5, 120)), 7)
        t = build(xy)
        s = run(xy, random_rects(rng, 150, t.bounding_square, rho=float(rng.choice([1, 2, 4]))), check=trial < 5)
        depth = t.depth
        assert online.unhit_round_counts(s).max() <= depth + 1
        objs = [r.object for r in s.log]
        opt = exact_min_hitting_set(reduce(objs, xy))
        assert opt.certified
        per_round = max(len(r.added_points) for r in s.log)
        assert len(s.hitting_set) <= per_round * (depth + 1) * opt.size


def test_corners_outside_root_activate_root():
    xy = np.array([(0.25, 0.25), (0.75, 0.75), (0.5, 0.25)])
    s = online.init(build(xy))
    rep = online.process(s, AxisRect(-5, -5, 5, 5))
    assert rep.activated_nodes[0] == 0
    assert set(s.tree.root.ext) <= set(s.hitting_set)


def test_determinism():
    rng = np.random.default_rng(21)
    xy = dyadic_points(rng, 60, 8)
    rects = random_rects(rng, 100, build(xy).bounding_square)
    a = run(xy, rects, check=False)
    b = run(xy, rects, check=False)
    assert [r.to_dict() for r in a.log] == [r.to_dict() for r in b.log]


def test_round_report_serialises():
    s = online.init(build([(0.5, 0.5), (0.25, 0.75)]))
    d = online.process(s, AxisRect(0, 0, 1, 1)).to_dict()
    assert set(d) == {"round", "object", "already_hit", "activated_nodes", "added_points", "fallback_point_used"}
    assert all(isinstance(v, int) for v in d["added_points"] + d["activated_nodes"])
