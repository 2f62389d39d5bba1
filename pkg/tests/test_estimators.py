import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from onlinehit import OnlineHomothetHitter, OnlineRectangleHitter


def points(seed=0, n=50):
    rng = np.random.default_rng(seed)
    k = rng.choice(1 << 12, n, replace=False)
    return np.column_stack([k % 64, k // 64]) / 64.0


def test_params_and_clone():
    est = OnlineRectangleHitter(check_invariants=True)
    assert est.get_params() == {"check_invariants": True}
    c = clone(est)
    assert c.get_params() == est.get_params() and not hasattr(c, "state_")
    h = OnlineHomothetHitter(direct_parallelogram=False)
    assert clone(h).get_params() == {"polygon": None, "direct_parallelogram": False}


def test_rect_hitter_predict_and_transform():
    X = points()
    R = np.array([[0, 0, 0.5, 0.5], [0.5, 0.5, 1, 1], [0.25, 0, 0.75, 1]])
    est = OnlineRectangleHitter(check_invariants=True).fit(X).partial_fit(R)
    pred = est.predict(R)
    H = set(est.hitting_set_.tolist())
    for row, pid in zip(R, pred):
        assert pid in H
        x0, y0, x1, y1 = row
        assert x0 <= X[pid, 0] <= x1 and y0 <= X[pid, 1] <= y1
    assert est.predict([[5, 5, 6, 6]]).tolist() == [-1]
    T = est.transform(X)
    assert T.shape == (len(X), 3)
    assert set(np.flatnonzero(T[:, 0]).tolist()) == H
    assert (T[:, 2] <= est.tree_.depth + 1).all()


def test_rect_hitter_input_checks():
    with pytest.raises(NotFittedError):
        OnlineRectangleHitter().predict([[0, 0, 1, 1]])
    with pytest.raises(ValueError):
        OnlineRectangleHitter().fit([[0, 0, 1]])
    with pytest.raises(ValueError):
        OnlineRectangleHitter().fit([[0, 0], [0, 0]])
    est = OnlineRectangleHitter().fit(points())
    with pytest.raises(ValueError):
        est.partial_fit([[0, 0, 1]])
    with pytest.raises(ValueError):
        est.transform(points(seed=1))


def test_homothet_hitter():
    X = points(n=80)
    Hs = np.array([[1.0, 0.0, 0.0], [0.5, 0.25, 0.25], [0.25, 0.5, 0.0]])
    est = OnlineHomothetHitter().fit(X).partial_fit(Hs)
    assert len(est.trees_) == 3
    pred = est.predict(Hs)
    assert (pred >= 0).all() and set(pred.tolist()) <= set(est.hitting_set_.tolist())
    sq = OnlineHomothetHitter(polygon=[[0, 0], [1, 0], [1, 1], [0, 1]]).fit(X)
    assert len(sq.trees_) == 1
