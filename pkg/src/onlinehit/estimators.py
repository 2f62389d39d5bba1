"""Estimator-style wrappers around the online hitters.

``fit`` takes the point set, ``partial_fit`` serves a batch of objects in
order, ``predict`` reports for each object a hitting-set point inside it
(smallest id) or -1, and ``transform`` gives per-point audit features.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import online
from .bbd import build
from .generators import DEFAULT_POLYGON
from .geometry import AxisRect, Homothet, SimplePolygon, points_in_polygon
from .homothet import init_multi, process_homothet

__all__ = ["OnlineRectangleHitter", "OnlineHomothetHitter"]


def _points(X) -> np.ndarray:
    X = check_array(X, dtype=np.float64)
    if X.shape[1] != 2:
        raise ValueError(f"expected points of shape (n, 2), got {X.shape}")
    if len(np.unique(X, axis=0)) != len(X):
        raise ValueError("duplicate points")
    return X


def _objects(R, width: int, what: str) -> np.ndarray:
    R = check_array(R, dtype=np.float64)
    if R.shape[1] != width:
        raise ValueError(f"expected {what} of shape (m, {width}), got {R.shape}")
    return R


class OnlineRectangleHitter(TransformerMixin, BaseEstimator):
    """Online hitting set for axis-aligned rectangles over a fixed point set.

    Parameters
    ----------
    check_invariants : bool
        Re-check the state invariants after every served rectangle and raise
        ``AssertionError`` on the first violation.
    """

    def __init__(self, check_invariants: bool = False):
        self.check_invariants = check_invariants

    def fit(self, X, y=None):
        X = _points(X)
        self.n_features_in_ = 2
        self.tree_ = build(X)
        self.state_ = online.init(self.tree_)
        return self

    def partial_fit(self, R, y=None):
        """Serve rectangles ``[x_lo, y_lo, x_hi, y_hi]`` in row order."""
        check_is_fitted(self, "state_")
        for row in _objects(R, 4, "rectangles"):
            online.process(self.state_, AxisRect.checked(*row))
            if self.check_invariants:
                errs = online.invariant_violations(self.state_)
                if errs:
                    raise AssertionError(errs[0])
        return self

    @property
    def hitting_set_(self) -> np.ndarray:
        check_is_fitted(self, "state_")
        return np.array(self.state_.hitting_set, dtype=np.int64)

    def predict(self, R) -> np.ndarray:
        check_is_fitted(self, "state_")
        R = _objects(R, 4, "rectangles")
        ids = np.sort(self.hitting_set_)
        hp = self.tree_.points[ids]
        out = np.full(len(R), -1, dtype=np.int64)
        for i, row in enumerate(R):
            inside = ids[AxisRect(*row).mask(hp)]
            if len(inside):
                out[i] = inside[0]
        return out

    def transform(self, X) -> np.ndarray:
        """Per point of the fitted set: ``[in hitting set, leaf depth, unhit rounds]``."""
        check_is_fitted(self, "state_")
        X = check_array(X, dtype=np.float64)
        if X.shape != self.tree_.points.shape or not np.array_equal(X, self.tree_.points):
            raise ValueError("transform expects the fitted point set")
        st = self.state_
        depth = np.array([st.tree.nodes[leaf].depth for leaf in st.tree.leaf_of_point], dtype=float)
        return np.column_stack([st.in_h.astype(float), depth, online.unhit_round_counts(st).astype(float)])


class OnlineHomothetHitter(BaseEstimator):
    """Online hitting set for positive homothets ``scale * polygon + (tx, ty)``.

    Parameters
    ----------
    polygon : array-like of shape (k, 2), optional
        Counterclockwise simple polygon; defaults to the unit right triangle.
    direct_parallelogram : bool
        Use a single piece when the polygon is a parallelogram.
    """

    def __init__(self, polygon=None, direct_parallelogram: bool = True):
        self.polygon = polygon
        self.direct_parallelogram = direct_parallelogram

    def _poly(self) -> SimplePolygon:
        if self.polygon is None:
            return DEFAULT_POLYGON
        if isinstance(self.polygon, SimplePolygon):
            return self.polygon
        return SimplePolygon.from_coords(check_array(self.polygon, dtype=np.float64))

    def fit(self, X, y=None):
        X = _points(X)
        self.n_features_in_ = 2
        self.state_ = init_multi(X, self._poly(), self.direct_parallelogram)
        self.trees_ = self.state_.trees
        return self

    def partial_fit(self, H, y=None):
        """Serve homothets ``[scale, tx, ty]`` in row order."""
        check_is_fitted(self, "state_")
        for a, tx, ty in _objects(H, 3, "homothets"):
            process_homothet(self.state_, Homothet(float(a), (float(tx), float(ty))))
        return self

    @property
    def hitting_set_(self) -> np.ndarray:
        check_is_fitted(self, "state_")
        return np.array(self.state_.hitting_set, dtype=np.int64)

    def predict(self, H) -> np.ndarray:
        check_is_fitted(self, "state_")
        H = _objects(H, 3, "homothets")
        ids = np.sort(self.hitting_set_)
        hp = self.state_.points[ids]
        poly = self.state_.decomposition.polygon
        out = np.full(len(H), -1, dtype=np.int64)
        for i, (a, tx, ty) in enumerate(H):
            inside = ids[points_in_polygon((hp - (tx, ty)) / a, poly)]
            if len(inside):
                out[i] = inside[0]
        return out
