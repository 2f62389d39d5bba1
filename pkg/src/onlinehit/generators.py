"""Seeded instance generators.

Every coordinate is a dyadic rational, so the exact predicates downstream
never see rounding.  Objects are redrawn from scratch until they contain a
point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import AxisRect, Homothet, SimplePolygon, points_in_polygon
from .instance import Instance

__all__ = [
    "KINDS",
    "GenSpec",
    "generate",
    "gen_uniform",
    "gen_one_point_nest",
    "gen_grid_khan",
    "gen_homothet_random",
    "DEFAULT_POLYGON",
]

KINDS = ("uniform-squares", "one-point-nest", "grid-khan", "homothet-random")
GRID_BITS = 20
MAX_ATTEMPTS = 1_000_000
DEFAULT_POLYGON = SimplePolygon.from_coords([(0, 0), (1, 0), (0, 1)])


@dataclass(frozen=True)
class GenSpec:
    kind: str
    seed: int
    n: int
    m: int
    rho: float = 1.0
    polygon: Optional[SimplePolygon] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if not self.rho >= 1:
            raise ValueError("need rho >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def header(self, **extra) -> dict:
        d = {"generator": self.kind, "seed": self.seed, "n": self.n, "m": self.m, "rho": self.rho}
        d.update(extra)
        return d


def generate(spec: GenSpec) -> Instance:
    return {
        "uniform-squares": gen_uniform,
        "one-point-nest": gen_one_point_nest,
        "grid-khan": gen_grid_khan,
        "homothet-random": gen_homothet_random,
    }[spec.kind](spec)


def _unit_points(rng: np.random.Generator, n: int, bits: int = GRID_BITS) -> np.ndarray:
    """``n`` distinct points of the ``2^-bits`` grid in ``[0, 1)^2``."""
    side = 1 << bits
    if n > side * side:
        raise ValueError("grid too coarse for n distinct points")
    keys: dict[int, None] = {}
    while len(keys) < n:
        draw = rng.integers(0, side * side, size=n - len(keys), dtype=np.int64)
        for k in draw.tolist():
            keys.setdefault(k, None)
    k = np.fromiter(keys, dtype=np.int64, count=n)
    return np.column_stack([k % side, k // side]).astype(float) / side


class _XIndex:
    """Points sorted by x for quick nonemptiness tests."""

    def __init__(self, xy: np.ndarray):
        order = np.argsort(xy[:, 0], kind="stable")
        self.xs = xy[order, 0]
        self.ys = xy[order, 1]
        self.xy = xy[order]

    def slab(self, x_lo: float, x_hi: float) -> slice:
        return slice(np.searchsorted(self.xs, x_lo, "left"), np.searchsorted(self.xs, x_hi, "right"))

    def rect_count(self, r: AxisRect) -> int:
        ys = self.ys[self.slab(r.x_lo, r.x_hi)]
        return int(((ys >= r.y_lo) & (ys <= r.y_hi)).sum())

    def rect_nonempty(self, r: AxisRect) -> bool:
        return self.rect_count(r) > 0


def _dyadic_size(rng, lo_exp: int, hi_exp: int) -> float:
    """``2^e * (8 + j) / 8`` with ``e`` in ``[lo_exp, hi_exp]``, ``j`` in ``[0, 8)``."""
    e = int(rng.integers(lo_exp, hi_exp + 1))
    return float(np.ldexp(8 + int(rng.integers(0, 8)), e - 3))


def gen_uniform(spec: GenSpec) -> Instance:
    """Uniform dyadic points and rectangles of aspect ratio at most ``rho``."""
    rng = np.random.default_rng(spec.seed)
    xy = _unit_points(rng, spec.n)
    idx = _XIndex(xy)
    scale = float(1 << GRID_BITS)
    objs = []
    for _ in range(spec.m):
        for _attempt in range(MAX_ATTEMPTS):
            short = _dyadic_size(rng, -8, -1)
            # aspect in eighths, never above rho
            aspect = 1 + float(np.floor(rng.random() * (spec.rho - 1) * 8)) / 8
            w, h = short, short * aspect
            if rng.random() < 0.5:
                w, h = h, w
            x_lo = (int(rng.integers(0, 1 << GRID_BITS)) - 0.5 * w * scale) / scale
            y_lo = (int(rng.integers(0, 1 << GRID_BITS)) - 0.5 * h * scale) / scale
            r = AxisRect(x_lo, y_lo, x_lo + w, y_lo + h)
            if idx.rect_nonempty(r):
                objs.append(r)
                break
        else:
            raise RuntimeError("could not draw a nonempty rectangle")
    meta = spec.header(grid_bits=GRID_BITS, short_side="2^e*(8+j)/8, e in [-8,-1]", aspect_step=0.125)
    return Instance(xy, "rects", objs, None, meta)


_NEST_OFFSETS = (0.375, 0.4375, 0.5, 0.5625, 0.625)
_NEST_MAX_RINGS = 64
_NEST_MIN_EXP = -1000


def _ring(half: float, q: int) -> list[tuple[float, float]]:
    """The ``8q`` points spaced ``half/q`` apart on the boundary of ``[-half, half]^2``."""
    t = [half * i / q for i in range(-q, q)]
    out = [(x, -half) for x in t]
    out += [(half, y) for y in t]
    out += [(-x, half) for x in t]
    out += [(-half, -y) for y in t]
    return out


def gen_one_point_nest(spec: GenSpec) -> Instance:
    """Target point at the origin, decoys on rings of half-size ``2^-r``.

    Square ``i`` (from 1) has side ``3 * 2^-i`` and offsets in ``[3/8, 5/8]``,
    so it holds the target and exactly the rings ``r >= i``.  Every square
    contains the origin, hence the optimum is one point.  Once the side would
    drop below ``2^-1000`` the last square is repeated.
    """
    rng = np.random.default_rng(spec.seed)
    decoys = spec.n - 1
    q = 1
    while decoys > 8 * q * _NEST_MAX_RINGS:
        q *= 2
    pts = [(0.0, 0.0)]
    r = 0
    while len(pts) < spec.n:
        r += 1
        pts.extend(_ring(2.0**-r, q)[: spec.n - len(pts)])
    xy = np.array(pts, dtype=float)

    objs = []
    levels = 0
    for i in range(1, spec.m + 1):
        if -i < _NEST_MIN_EXP:
            objs.append(objs[-1])
            continue
        side = 3 * 2.0**-i
        a = _NEST_OFFSETS[int(rng.integers(0, len(_NEST_OFFSETS)))]
        b = _NEST_OFFSETS[int(rng.integers(0, len(_NEST_OFFSETS)))]
        objs.append(AxisRect(-a * side, -b * side, (1 - a) * side, (1 - b) * side))
        levels += 1
    meta = spec.header(rings=r, ring_factor=0.5, points_per_ring=8 * q, levels=levels, side="3*2^-i", target=0)
    return Instance(xy, "rects", objs, None, meta)


def gen_grid_khan(spec: GenSpec) -> Instance:
    """Integer grid points and random quadtree descents of squares.

    Each descent starts at the whole grid and moves to a random nonempty
    quadrant until the square holds a single point, then restarts.
    """
    rng = np.random.default_rng(spec.seed)
    bits = 1
    while (1 << (2 * bits)) < 2 * spec.n:
        bits += 1
    side = 1 << bits
    xy = _unit_points(rng, spec.n, bits) * side
    idx = _XIndex(xy)

    def square(x0, y0, s):
        # integer cells [x0, x0+s) padded to a closed square of side s - 1/2
        return AxisRect(x0 - 0.25, y0 - 0.25, x0 + s - 0.75, y0 + s - 0.75)

    objs = []
    x0, y0, s = 0, 0, side
    while len(objs) < spec.m:
        objs.append(square(x0, y0, s))
        if idx.rect_count(objs[-1]) == 1:
            x0, y0, s = 0, 0, side
            continue
        h = s // 2
        kids = [(x0 + dx, y0 + dy, h) for dy in (0, h) for dx in (0, h)]
        kids = [k for k in kids if idx.rect_nonempty(square(*k))]
        x0, y0, s = kids[int(rng.integers(0, len(kids)))]
    meta = spec.header(grid_side=side, descent="uniform over nonempty quadrants")
    return Instance(xy, "rects", objs, None, meta)


def gen_homothet_random(spec: GenSpec) -> Instance:
    """Uniform dyadic points and homothets with scale in ``[2^-8, 2^3]``."""
    if spec.polygon is None:
        raise ValueError("homothet-random needs a polygon")
    poly = spec.polygon
    rng = np.random.default_rng(spec.seed)
    xy = _unit_points(rng, spec.n)
    idx = _XIndex(xy)
    bb = poly.bbox()
    grid = float(1 << GRID_BITS)
    objs = []
    for _ in range(spec.m):
        for _attempt in range(MAX_ATTEMPTS):
            a = _dyadic_size(rng, -8, 2)
            # translations keep the scaled bounding box overlapping [0, 1]^2
            tx = np.floor((rng.random() * (1 + a * bb.width) - a * bb.x_hi) * grid) / grid
            ty = np.floor((rng.random() * (1 + a * bb.height) - a * bb.y_hi) * grid) / grid
            h = Homothet(a, (float(tx), float(ty)))
            sl = idx.slab(a * bb.x_lo + tx, a * bb.x_hi + tx)
            cand = idx.xy[sl]
            if len(cand) and points_in_polygon((cand - (tx, ty)) / a, poly).any():
                objs.append(h)
                break
        else:
            raise RuntimeError("could not draw a nonempty homothet")
    meta = spec.header(grid_bits=GRID_BITS, scale="2^e*(8+j)/8, e in [-8,2]")
    return Instance(xy, "homothets", objs, poly, meta)
