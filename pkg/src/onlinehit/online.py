"""Online hitting set for axis-aligned rectangles on top of a BBD tree.

The state keeps the hitting set ``H`` and the set of active tree nodes.  Active
nodes are closed upwards, come in sibling pairs, and have all their extremal
points in ``H``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .bbd import BBDTree
from .crossing import crossed_nodes
from .geometry import AxisRect

__all__ = [
    "InfeasibleObject",
    "RoundReport",
    "HitterState",
    "init",
    "process",
    "unhit_round_counts",
    "invariant_violations",
]


class InfeasibleObject(ValueError):
    def __init__(self, msg: str = "infeasible object", index: Optional[int] = None):
        super().__init__(msg if index is None else f"{msg} (object {index})")
        self.index = index


@dataclass
class RoundReport:
    round: int
    object: AxisRect
    already_hit: bool
    activated_nodes: list[int] = field(default_factory=list)
    added_points: list[int] = field(default_factory=list)
    fallback_point_used: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["object"] = [float(v) for v in self.object]
        return d


@dataclass(eq=False)
class HitterState:
    tree: BBDTree
    active: bytearray
    hitting_set: list[int]
    in_h: np.ndarray
    round: int = 0
    log: list[RoundReport] = field(default_factory=list)

    @property
    def active_nodes(self) -> list[int]:
        return [i for i, a in enumerate(self.active) if a]

    def hits(self, rect: AxisRect) -> bool:
        if not self.hitting_set:
            return False
        hp = self.tree.points[self.hitting_set]
        return bool(rect.mask(hp).any())


def init(tree: BBDTree) -> HitterState:
    return HitterState(
        tree=tree,
        active=bytearray(tree.node_count),
        hitting_set=[],
        in_h=np.zeros(tree.n, dtype=bool),
    )


def process(state: HitterState, s: AxisRect) -> RoundReport:
    """Serve one rectangle; afterwards ``s`` contains a point of the hitting set."""
    s = AxisRect.checked(*s)
    tree = state.tree
    xy = tree.points
    in_s = s.mask(xy)
    if not in_s.any():
        raise InfeasibleObject()

    state.round += 1
    if (state.in_h & in_s).any():
        rep = RoundReport(state.round, s, True)
        state.log.append(rep)
        return rep

    nodes = tree.nodes
    active = state.active
    activated: list[int] = []
    added: list[int] = []

    def activate(v: int) -> None:
        if active[v]:
            return
        active[v] = 1
        activated.append(v)
        for pid in nodes[v].ext:
            if not state.in_h[pid]:
                state.in_h[pid] = True
                state.hitting_set.append(pid)
                added.append(pid)

    def activate_pair(v: int) -> None:
        activate(v)
        sib = tree.sibling(v)
        if sib is not None:
            activate(sib)

    def highest_inactive(path: list[int]) -> Optional[int]:
        for v in path:
            if not active[v]:
                return v
        return None

    # corners, in the order lower-left, lower-right, upper-left, upper-right
    root_box = tree.bounding_square
    for a in s.corners():
        if root_box.contains(a):
            v = highest_inactive(tree.path_to(a))
            if v is not None:
                activate_pair(v)
        else:
            activate(0)

    # crossed cells, pre-order, reading the flags as they change
    for u in crossed_nodes(tree, s):
        if active[u]:
            kids = nodes[u].children
            if kids is not None and not active[kids[0]]:
                activate(kids[0])
                activate(kids[1])
        else:
            activate_pair(highest_inactive(tree.ancestors(u)))

    fallback = False
    if not (state.in_h & in_s).any():
        pid = int(np.flatnonzero(in_s)[0])
        state.in_h[pid] = True
        state.hitting_set.append(pid)
        added.append(pid)
        fallback = True

    rep = RoundReport(state.round, s, False, activated, added, fallback)
    state.log.append(rep)
    return rep


def unhit_round_counts(state: HitterState) -> np.ndarray:
    """Per point: rounds whose object contained it and arrived unhit."""
    xy = state.tree.points
    counts = np.zeros(len(xy), dtype=np.int64)
    for rep in state.log:
        if not rep.already_hit:
            counts += rep.object.mask(xy)
    return counts


def invariant_violations(state: HitterState) -> list[str]:
    """Structural checks on the state, plus hitting of every object served so far."""
    tree = state.tree
    nodes = tree.nodes
    active = state.active
    errs = []
    for v in nodes:
        if not active[v.id]:
            continue
        if v.parent >= 0 and not active[v.parent]:
            errs.append(f"node {v.id} active under inactive parent {v.parent}")
        sib = tree.sibling(v.id)
        if sib is not None and not active[sib]:
            errs.append(f"node {v.id} active without its sibling {sib}")
        missing = [p for p in v.ext if not state.in_h[p]]
        if missing:
            errs.append(f"extremal points {missing} of active node {v.id} not in H")
    if len(set(state.hitting_set)) != len(state.hitting_set):
        errs.append("hitting set has repeated points")
    if int(state.in_h.sum()) != len(state.hitting_set):
        errs.append("hitting set bookkeeping out of sync")
    for rep in state.log:
        if not state.hits(rep.object):
            errs.append(f"object of round {rep.round} is not hit")
    return errs
