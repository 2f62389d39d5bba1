"""Exact minimum hitting set, the offline baseline for competitive ratios.

Geometric objects are reduced to point-id sets, the kernel is shrunk with the
usual reductions (forced singletons, dominated sets, dominated points), split
into independent components, and each component is solved by depth-first
branch and bound.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import AxisRect, Homothet, SimplePolygon, points_in_polygon
from .online import InfeasibleObject

__all__ = [
    "HittingInstance",
    "HittingResult",
    "reduce",
    "object_point_sets",
    "exact_min_hitting_set",
    "greedy_hitting_set",
    "disjoint_packing_bound",
    "competitive_ratio",
]


@dataclass(frozen=True)
class HittingInstance:
    num_points: int
    object_point_sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for i, s in enumerate(self.object_point_sets):
            if not s:
                raise InfeasibleObject("infeasible instance", i)


@dataclass(frozen=True)
class HittingResult:
    hitting_set: tuple[int, ...]
    certified: bool
    lower_bound: int
    upper_bound: int
    nodes: int

    @property
    def size(self) -> int:
        return len(self.hitting_set)

    @property
    def status(self) -> str:
        return "OPTIMAL" if self.certified else f"UNPROVEN (best found = {self.size})"


def object_point_sets(objects: Sequence, points, polygon: Optional[SimplePolygon] = None) -> list[tuple[int, ...]]:
    """Closed containment sets, one per object, in input order."""
    xy = np.asarray(points, dtype=float).reshape(-1, 2)
    out = []
    for obj in objects:
        if isinstance(obj, Homothet):
            if polygon is None:
                raise ValueError("homothet objects need a polygon")
            local = (xy - np.asarray(obj.translation)) / obj.scale
            mask = points_in_polygon(local, polygon)
        else:
            mask = AxisRect(*obj).mask(xy)
        out.append(tuple(int(i) for i in np.flatnonzero(mask)))
    return out


def reduce(objects: Sequence, points, polygon: Optional[SimplePolygon] = None) -> HittingInstance:
    """Abstract instance with duplicate sets merged and supersets dropped."""
    sets = object_point_sets(objects, points, polygon)
    for i, s in enumerate(sets):
        if not s:
            raise InfeasibleObject("infeasible instance", i)
    return HittingInstance(len(np.asarray(points).reshape(-1, 2)), tuple(_minimal_sets(sets)))


def _minimal_sets(sets) -> list[tuple[int, ...]]:
    uniq = sorted(set(tuple(sorted(s)) for s in sets), key=lambda s: (len(s), s))
    kept: list[tuple[int, ...]] = []
    kept_masks: list[int] = []
    by_min: dict[int, list[int]] = {}
    for s in uniq:
        m = 0
        for p in s:
            m |= 1 << p
        dominated = False
        for p in s:
            for k in by_min.get(p, ()):
                if kept_masks[k] & m == kept_masks[k]:
                    dominated = True
                    break
            if dominated:
                break
        if not dominated:
            by_min.setdefault(s[0], []).append(len(kept))
            kept.append(s)
            kept_masks.append(m)
    return sorted(kept)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def greedy_hitting_set(sets: Sequence[Sequence[int]]) -> list[int]:
    """Repeatedly take the point in most unhit sets (smallest id on ties)."""
    remaining = [frozenset(s) for s in sets]
    chosen = []
    while remaining:
        counts: dict[int, int] = {}
        for s in remaining:
            for p in s:
                counts[p] = counts.get(p, 0) + 1
        best = min(counts, key=lambda p: (-counts[p], p))
        chosen.append(best)
        remaining = [s for s in remaining if best not in s]
    return sorted(chosen)


def disjoint_packing_bound(sets: Sequence[Sequence[int]]) -> int:
    """Size of a greedy family of pairwise disjoint sets (smallest first)."""
    used: set[int] = set()
    count = 0
    for s in sorted(sets, key=len):
        if used.isdisjoint(s):
            used.update(s)
            count += 1
    return count


class _Timeout(Exception):
    pass


class _Component:
    """Branch and bound over one connected component, points as bit positions."""

    def __init__(self, sets: list[int], labels: list[int], deadline: Optional[float]):
        self.sets = sets
        self.labels = labels
        self.deadline = deadline
        self.nodes = 0
        greedy = greedy_hitting_set([list(_bits(s)) for s in sets])
        self.best = sorted(greedy, key=lambda b: labels[b])
        self.root_lb = self._packing(sets)

    @staticmethod
    def _packing(sets: list[int]) -> int:
        used = 0
        count = 0
        for s in sorted(sets, key=int.bit_count):
            if not s & used:
                used |= s
                count += 1
        return count

    def solve(self) -> None:
        if self.root_lb < len(self.best):
            self._search(self.sets, [])

    def _search(self, sets: list[int], chosen: list[int]) -> None:
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise _Timeout
        chosen = list(chosen)
        # forced points from singleton sets
        while True:
            forced = 0
            for s in sets:
                if s & (s - 1) == 0:
                    forced |= s
            if not forced:
                break
            chosen.extend(_bits(forced))
            sets = [s for s in sets if not s & forced]
        if not sets:
            if len(chosen) < len(self.best):
                self.best = sorted(chosen, key=lambda b: self.labels[b])
            return
        if len(chosen) + self._packing(sets) >= len(self.best):
            return
        pivot = min(sets, key=lambda s: (s.bit_count(), s))
        freq: dict[int, int] = {}
        for s in sets:
            for b in _bits(s & pivot):
                freq[b] = freq.get(b, 0) + 1
        order = sorted(_bits(pivot), key=lambda b: (-freq[b], self.labels[b]))
        excluded = 0
        for b in order:
            bit = 1 << b
            rest = [s & ~excluded for s in sets if not s & bit]
            if all(rest):
                self._search(rest, chosen + [b])
            excluded |= bit
            if len(chosen) + 1 >= len(self.best):
                return


def _kernel(sets: list[frozenset]) -> tuple[list[int], list[frozenset]]:
    """Forced points plus the reduced family (no singletons, no dominance)."""
    forced: list[int] = []
    sets = list(sets)
    while True:
        changed = False
        single = sorted({next(iter(s)) for s in sets if len(s) == 1})
        if single:
            forced.extend(single)
            hit = set(single)
            sets = [s for s in sets if hit.isdisjoint(s)]
            changed = True
        minimal = [frozenset(s) for s in _minimal_sets(sets)] if sets else []
        if len(minimal) != len(sets):
            changed = True
        sets = minimal
        # a point whose sets all contain a smaller-or-equal partner is redundant
        lists: dict[int, list[int]] = {}
        for i, s in enumerate(sets):
            for p in s:
                lists.setdefault(p, []).append(i)
        owners = {p: frozenset(v) for p, v in lists.items()}
        pts = sorted(owners, key=lambda p: (-len(owners[p]), p))
        drop = set()
        for i, p in enumerate(pts):
            for q in pts[:i]:
                if q not in drop and owners[p] <= owners[q]:
                    drop.add(p)
                    break
        if drop:
            sets = [frozenset(s - drop) for s in sets]
            changed = True
        if not changed:
            return forced, sets


def _components(sets: list[frozenset]) -> list[list[frozenset]]:
    parent: dict[int, int] = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in sets:
        for p in s:
            parent.setdefault(p, p)
        it = iter(s)
        first = find(next(it))
        for p in it:
            r = find(p)
            if r != first:
                parent[max(r, first)] = min(r, first)
                first = min(r, first)
    groups: dict[int, list[frozenset]] = {}
    for s in sets:
        groups.setdefault(find(next(iter(s))), []).append(s)
    return [groups[k] for k in sorted(groups)]


def exact_min_hitting_set(inst: HittingInstance, time_limit: Optional[float] = None) -> HittingResult:
    """Minimum-cardinality hitting set by branch and bound.

    ``certified`` is False only when ``time_limit`` (seconds) ran out; the
    returned set is then the best one found, not a proven optimum.
    """
    deadline = None if time_limit is None else time.monotonic() + time_limit
    forced, sets = _kernel([frozenset(s) for s in inst.object_point_sets])
    chosen = list(forced)
    certified = True
    lower = len(forced)
    nodes = 0
    for comp in _components(sets):
        labels = sorted({p for s in comp for p in s})
        pos = {p: i for i, p in enumerate(labels)}
        masks = []
        for s in comp:
            m = 0
            for p in s:
                m |= 1 << pos[p]
            masks.append(m)
        solver = _Component(masks, labels, deadline)
        try:
            solver.solve()
            lower += len(solver.best)
        except _Timeout:
            certified = False
            lower += solver.root_lb
        nodes += solver.nodes
        chosen.extend(labels[b] for b in solver.best)
    chosen = sorted(chosen)
    return HittingResult(tuple(chosen), certified, lower if not certified else len(chosen), len(chosen), nodes)


def competitive_ratio(alg_size: int, opt_size: int) -> float:
    if opt_size < 1:
        raise ValueError("competitive ratio needs opt_size >= 1")
    if alg_size == 0:
        warnings.warn("empty online hitting set: vacuous run", stacklevel=2)
    return alg_size / opt_size
