"""Online hitting sets for rectangles and polygon homothets over a fixed point set."""

from .bbd import BBDTree, build, dump_tree, locate_point, validate
from .estimators import OnlineHomothetHitter, OnlineRectangleHitter
from .generators import GenSpec, generate
from .geometry import AxisRect, Homothet, Point, SimplePolygon
from .homothet import decompose, init_multi, process_homothet
from .instance import Instance, ParseError, read_instance, write_instance
from .online import HitterState, InfeasibleObject, init, process, unhit_round_counts
from .opt import competitive_ratio, exact_min_hitting_set, reduce

__all__ = [
    "AxisRect",
    "BBDTree",
    "GenSpec",
    "HitterState",
    "Homothet",
    "InfeasibleObject",
    "Instance",
    "OnlineHomothetHitter",
    "OnlineRectangleHitter",
    "ParseError",
    "Point",
    "SimplePolygon",
    "build",
    "competitive_ratio",
    "decompose",
    "dump_tree",
    "exact_min_hitting_set",
    "generate",
    "init",
    "init_multi",
    "locate_point",
    "process",
    "process_homothet",
    "read_instance",
    "reduce",
    "unhit_round_counts",
    "validate",
    "write_instance",
]

__version__ = "0.1.0"
