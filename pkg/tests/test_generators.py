import math

import numpy as np
import pytest

from onlinehit.generators import DEFAULT_POLYGON, KINDS, GenSpec, generate
from onlinehit.geometry import SimplePolygon, aspect_ratio
from onlinehit.instance import dumps
from onlinehit.opt import exact_min_hitting_set, reduce


def is_dyadic(v, max_bits=1100):
    m, e = math.frexp(v)
    return float(m * 2.0**53).is_integer() and e > -max_bits


def spec(kind, seed=1, n=200, m=150, rho=1.0):
    return GenSpec(kind, seed, n, m, rho, DEFAULT_POLYGON if kind == "homothet-random" else None)


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic_per_seed(kind):
    assert dumps(generate(spec(kind, seed=42))) == dumps(generate(spec(kind, seed=42)))
    assert dumps(generate(spec(kind, seed=42))) != dumps(generate(spec(kind, seed=43)))


@pytest.mark.parametrize("kind", KINDS)
def test_feasible_distinct_and_sized(kind):
    inst = generate(spec(kind))
    assert inst.n == 200 and inst.m == 150
    assert len(np.unique(inst.points, axis=0)) == inst.n
    assert all(mask.any() for mask in inst.object_masks())
    assert inst.meta["generator"] == kind and inst.meta["seed"] == 1


@pytest.mark.parametrize("kind", KINDS)
def test_coordinates_are_dyadic(kind):
    inst = generate(spec(kind))
    vals = inst.points.ravel().tolist()
    for o in inst.objects:
        vals += list(o) if not hasattr(o, "scale") else [o.scale, *o.translation]
    assert all(is_dyadic(v) for v in vals)


@pytest.mark.parametrize("rho", [1.0, 2.0, 4.0, 8.0, 2.5])
def test_uniform_aspect_bound(rho):
    inst = generate(spec("uniform-squares", n=100, m=300, rho=rho))
    asp = [aspect_ratio(r) for r in inst.objects]
    assert max(asp) <= rho
    if rho == 1.0:
        assert all(a == 1.0 for a in asp)


@pytest.mark.parametrize("n", [1, 9, 64, 300])
def test_nest_structure(n):
    inst = generate(spec("one-point-nest", n=n, m=40))
    target = inst.points[inst.meta["target"]]
    assert all(r.contains(target) for r in inst.objects)
    for outer, inner in zip(inst.objects, inst.objects[1:]):
        assert outer.contains_rect(inner)
        assert inner.width == outer.width / 2
    res = exact_min_hitting_set(reduce(inst.objects, inst.points))
    assert res.certified and res.hitting_set == (inst.meta["target"],)


def test_nest_repeats_past_the_exponent_floor():
    inst = generate(spec("one-point-nest", n=16, m=1100))
    assert inst.m == 1100 and inst.objects[-1] == inst.objects[-2]
    assert inst.objects[-1].width > 0


def test_grid_khan_descents():
    inst = generate(spec("grid-khan", n=100, m=200))
    side = inst.meta["grid_side"]
    assert np.all(inst.points == np.floor(inst.points)) and inst.points.max() < side
    assert all(r.width == r.height for r in inst.objects)
    # each descent restarts from the full grid
    assert inst.objects[0].width == side - 0.5


def test_homothet_scales_and_polygon():
    tri = SimplePolygon.from_coords([(0, 0), (2, 0), (1, 1)])
    inst = generate(GenSpec("homothet-random", 5, 80, 100, 1.0, tri))
    assert inst.mode == "homothets" and inst.polygon == tri
    assert all(2.0**-8 <= h.scale <= 2.0**3 for h in inst.objects)


@pytest.mark.parametrize(
    "args",
    [("nope", 1, 5, 5, 1.0), ("uniform-squares", 1, 0, 5, 1.0), ("uniform-squares", 1, 5, 0, 1.0),
     ("uniform-squares", 1, 5, 5, 0.5), ("uniform-squares", -1, 5, 5, 1.0)],
)
def test_spec_validation(args):
    with pytest.raises(ValueError):
        GenSpec(*args)


def test_homothet_without_polygon():
    with pytest.raises(ValueError):
        generate(GenSpec("homothet-random", 1, 5, 5))
