"""Run, optimum and ratio computations shared by the CLI and the test suites."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import online
from .bbd import ValidationReport, build, validate
from .geometry import aspect_ratio
from .homothet import decompose, init_multi, process_homothet
from .instance import Instance
from .opt import HittingResult, exact_min_hitting_set, reduce

__all__ = [
    "CSV_FIELDS",
    "RunReport",
    "BoundViolation",
    "run_online",
    "solve_opt",
    "max_aspect",
    "ratio_row",
    "format_row",
    "validate_instance_trees",
]

CSV_FIELDS = ("seed", "n", "m", "rho", "depth", "alg", "opt", "ratio", "max_per_round", "ms")


class BoundViolation(AssertionError):
    """A point was inside more unhit rounds than its tree depth allows."""


@dataclass
class RunReport:
    alg_size: int
    tree_depth: int
    max_points_per_round: int
    per_point_max_unhit_rounds: int
    wall_time_ms: float
    rounds: int
    sub_tree_depths: list = field(default_factory=list)
    per_piece_max_unhit_rounds: list = field(default_factory=list)
    fallback_rounds: int = 0
    opt_size: object = None
    ratio: Optional[float] = None
    log: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def run_online(inst: Instance):
    """Serve every object in order; returns the report, the round records and the final state.

    Raises ``InfeasibleObject`` (with the object index) before touching the
    state, and ``BoundViolation`` if a per-point unhit-round count exceeds
    depth + 1.
    """
    inst.check_feasible()
    t0 = time.perf_counter()
    if inst.mode == "rects":
        tree = build(inst.points)
        state = online.init(tree)
        for obj in inst.objects:
            online.process(state, obj)
        ms = (time.perf_counter() - t0) * 1000
        counts = online.unhit_round_counts(state)
        worst = int(counts.max()) if len(counts) else 0
        if worst > tree.depth + 1:
            raise BoundViolation(f"point inside {worst} unhit rounds, depth {tree.depth}")
        log = state.log
        rep = RunReport(
            alg_size=len(state.hitting_set),
            tree_depth=tree.depth,
            max_points_per_round=max((len(r.added_points) for r in log), default=0),
            per_point_max_unhit_rounds=worst,
            wall_time_ms=ms,
            rounds=len(log),
            fallback_rounds=sum(r.fallback_point_used for r in log),
        )
    else:
        state = init_multi(inst.points, inst.polygon)
        for obj in inst.objects:
            process_homothet(state, obj)
        ms = (time.perf_counter() - t0) * 1000
        depths = [t.depth for t in state.trees]
        piece_worst = []
        for j, sub in enumerate(state.sub_states):
            c = online.unhit_round_counts(sub)
            w = int(c.max()) if len(c) else 0
            if w > depths[j] + 1:
                raise BoundViolation(f"piece {j}: point inside {w} unhit rounds, depth {depths[j]}")
            piece_worst.append(w)
        log = state.log
        rep = RunReport(
            alg_size=len(state.hitting_set),
            tree_depth=max(depths),
            max_points_per_round=max((len(r.added_points) for r in log), default=0),
            per_point_max_unhit_rounds=max(piece_worst),
            wall_time_ms=ms,
            rounds=len(log),
            sub_tree_depths=depths,
            per_piece_max_unhit_rounds=piece_worst,
            fallback_rounds=sum(r.fallback_point_used for r in log),
        )
    return rep, [r.to_dict() for r in log], state


def solve_opt(inst: Instance, time_limit: Optional[float] = None) -> HittingResult:
    return exact_min_hitting_set(reduce(inst.objects, inst.points, inst.polygon), time_limit)


def max_aspect(inst: Instance) -> Optional[float]:
    if inst.mode != "rects" or not inst.objects:
        return None
    return float(max(aspect_ratio(o) for o in inst.objects))


def ratio_row(inst: Instance, time_limit: Optional[float] = None, timing: bool = False) -> dict:
    """One CSV record; ``ms`` is only filled when ``timing`` is set, so rows stay reproducible."""
    t0 = time.perf_counter()
    rep, _, _ = run_online(inst)
    res = solve_opt(inst, time_limit)
    ms = (time.perf_counter() - t0) * 1000
    rho = max_aspect(inst)
    return {
        "seed": inst.meta.get("seed", "-"),
        "n": inst.n,
        "m": inst.m,
        "rho": "-" if rho is None else repr(rho),
        "depth": rep.tree_depth,
        "alg": rep.alg_size,
        "opt": res.size if res.certified else "unproven",
        "ratio": f"{rep.alg_size / res.size:.6f}" if res.certified else "-",
        "max_per_round": rep.max_points_per_round,
        "ms": f"{ms:.3f}" if timing else "-",
    }


def format_row(row: dict) -> str:
    return ",".join(str(row[k]) for k in CSV_FIELDS)


def validate_instance_trees(inst: Instance, **kw) -> list[tuple[str, ValidationReport]]:
    """Validation reports for the tree over the points, plus one per piece for homothets."""
    out = [("points", validate(build(inst.points), **kw))]
    if inst.mode == "homothets":
        for j, m in enumerate(decompose(inst.polygon).maps):
            out.append((f"piece {j}", validate(build(m.apply(inst.points)), **kw)))
    return out
