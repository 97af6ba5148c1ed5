"""Weighted random forest regressor built on CART trees.

Split criterion: maximize the drop in weighted sum of squared deviations,
W(A)*Var_w(A) - W(L)*Var_w(L) - W(R)*Var_w(R), where W is the weight total
of a node and Var_w the weighted variance. Candidate thresholds are the
midpoints between consecutive sorted unique feature values; gain ties are
broken by (lower feature index, lower threshold). Leaves predict the
weighted mean of their targets.

Determinism: each tree draws its randomness from a generator derived from
(seed, tree index) only, and predictions average trees in index order, so
results are identical regardless of how many workers fit the forest.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, InvalidDataError, ParameterError
from .rngutil import rng_from


@dataclass(frozen=True)
class ForestConfig:
    """Forest hyperparameters. mtry=None resolves to ceil(sqrt(p)) at fit time."""

    n_trees: int = 1000
    mtry: int | None = None
    min_leaf: int = 5
    max_depth: int | None = None
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ParameterError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.mtry is not None and self.mtry < 1:
            raise ParameterError(f"mtry must be >= 1, got {self.mtry}")
        if self.min_leaf < 1:
            raise ParameterError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ParameterError(f"max_depth must be >= 1 or None, got {self.max_depth}")


class _Tree(NamedTuple):
    feature: np.ndarray   # int32, -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray


def _best_split(x, y, w, idx, feats, min_leaf):
    """Best (feature, threshold) over the candidate features, or (-1, 0) if none improves.

    All candidate features are scanned in one vectorized pass. Ties in gain
    resolve to the lowest feature index, then the lowest threshold: feats is
    ascending and both argmax calls below take the first maximum.
    """
    yv = y[idx]
    wv = w[idx]
    wy = wv * yv
    wyy = wy * yv
    tw = float(wv.sum())
    twy = float(wy.sum())
    twyy = float(wyy.sum())
    parent_sse = twyy - twy * twy / tw

    n = idx.size
    v = x[np.ix_(idx, feats)]
    order = np.argsort(v, axis=0, kind="stable")
    sv = np.take_along_axis(v, order, axis=0)
    valid = sv[:-1] < sv[1:]
    if min_leaf > 1:
        pos = np.arange(1, n)[:, None]
        valid &= (pos >= min_leaf) & (n - pos >= min_leaf)
    if not valid.any():
        return -1, 0.0
    cw = np.cumsum(wv[order], axis=0)[:-1]
    cwy = np.cumsum(wy[order], axis=0)[:-1]
    cwyy = np.cumsum(wyy[order], axis=0)[:-1]
    rw = tw - cw
    valid &= rw > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        sse = (cwyy - cwy * cwy / cw) + ((twyy - cwyy) - (twy - cwy) ** 2 / rw)
    gain = np.where(valid, parent_sse - sse, -np.inf)
    col_best = np.argmax(gain, axis=0)
    col_gain = gain[col_best, np.arange(gain.shape[1])]
    q = int(np.argmax(col_gain))
    if not col_gain[q] > 0.0:
        return -1, 0.0
    j = int(col_best[q])
    lo, hi = float(sv[j, q]), float(sv[j + 1, q])
    thr = 0.5 * (lo + hi)
    # The midpoint can round onto hi when the gap is one ulp; fall back to
    # the lower value so the right child stays non-empty under x <= thr.
    return int(feats[q]), thr if lo <= thr < hi else lo


def _grow_tree(x, y, w, cfg: ForestConfig, mtry: int, rng: np.random.Generator) -> _Tree:
    n, p = x.shape
    if cfg.bootstrap:
        rows = rng.integers(0, n, size=n)
        x, y, w = x[rows], y[rows], w[rows]

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    stack = [(np.arange(n), 0, root)]
    while stack:
        idx, depth, nid = stack.pop()
        yv = y[idx]
        splittable = (
            idx.size >= 2 * cfg.min_leaf
            and (cfg.max_depth is None or depth < cfg.max_depth)
            and (yv != yv[0]).any()
        )
        if splittable:
            feats = np.arange(p) if mtry == p else np.sort(rng.choice(p, size=mtry, replace=False))
            f, thr = _best_split(x, y, w, idx, feats, cfg.min_leaf)
        else:
            f = -1
        if f < 0:
            if (yv == yv[0]).all():
                value[nid] = float(yv[0])
            else:
                wv = w[idx]
                value[nid] = float(np.dot(wv, yv) / wv.sum())
            continue
        go_left = x[idx, f] <= thr
        lid = new_node()
        rid = new_node()
        feature[nid] = f
        threshold[nid] = thr
        left[nid] = lid
        right[nid] = rid
        stack.append((idx[~go_left], depth + 1, rid))
        stack.append((idx[go_left], depth + 1, lid))
    return _Tree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
    )


def _fit_tree_range(args) -> list[_Tree]:
    x, y, w, cfg, mtry, seed, indices = args
    return [_grow_tree(x, y, w, cfg, mtry, rng_from(seed, t)) for t in indices]


def _tree_predict(tree: _Tree, xs: np.ndarray) -> np.ndarray:
    nodes = np.zeros(len(xs), dtype=np.int32)
    while True:
        f = tree.feature[nodes]
        active = np.nonzero(f >= 0)[0]
        if active.size == 0:
            return tree.value[nodes]
        cur = nodes[active]
        go_left = xs[active, f[active]] <= tree.threshold[cur]
        nodes[active] = np.where(go_left, tree.left[cur], tree.right[cur])


@dataclass(frozen=True)
class Forest:
    """Fitted forest; predictions are the plain mean over trees."""

    trees: tuple[_Tree, ...]
    p: int
    config: ForestConfig

    def predict(self, x) -> float:
        xv = np.asarray(x, dtype=np.float64)
        if xv.ndim != 1 or xv.size != self.p:
            raise DimensionError(f"expected a vector of length {self.p}, got shape {xv.shape}")
        return float(self.predict_many(xv[None, :])[0])

    def predict_many(self, xs) -> np.ndarray:
        xm = np.ascontiguousarray(np.asarray(xs, dtype=np.float64))
        if xm.ndim != 2 or xm.shape[1] != self.p:
            raise DimensionError(f"expected shape (n, {self.p}), got {xm.shape}")
        out = np.zeros(len(xm), dtype=np.float64)
        for tree in self.trees:
            out += _tree_predict(tree, xm)
        return out / len(self.trees)


def fit_forest(
    xs,
    ys,
    ws=None,
    config: ForestConfig = ForestConfig(),
    seed: int = 0,
    n_workers: int = 1,
) -> Forest:
    """Fit a weighted forest on rows (xs[i], ys[i]) with weights ws[i] (default all 1)."""
    x = np.ascontiguousarray(np.asarray(xs, dtype=np.float64))
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"xs must be 2-d, got shape {x.shape}")
    if y.ndim != 1 or len(y) != len(x):
        raise DimensionError("ys must be 1-d with one entry per row of xs")
    n, p = x.shape
    if n == 0 or p == 0:
        raise InvalidDataError(f"training data must be non-empty, got shape {x.shape}")
    w = np.ones(n, dtype=np.float64) if ws is None else np.asarray(ws, dtype=np.float64)
    if w.shape != (n,):
        raise DimensionError("ws must be 1-d with one entry per row of xs")
    if not (np.isfinite(x).all() and np.isfinite(y).all() and np.isfinite(w).all()):
        raise InvalidDataError("xs, ys and ws must be finite")
    if not (w > 0).all():
        raise InvalidDataError("weights must be strictly positive")
    mtry = config.mtry if config.mtry is not None else math.ceil(math.sqrt(p))
    if not 1 <= mtry <= p:
        raise ParameterError(f"mtry must be in [1, {p}], got {mtry}")
    if n_workers < 1:
        raise ParameterError(f"n_workers must be >= 1, got {n_workers}")

    indices = range(config.n_trees)
    if n_workers == 1 or config.n_trees == 1:
        trees = _fit_tree_range((x, y, w, config, mtry, seed, indices))
    else:
        chunks = np.array_split(np.arange(config.n_trees), min(n_workers, config.n_trees))
        jobs = [(x, y, w, config, mtry, seed, chunk.tolist()) for chunk in chunks if chunk.size]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            trees = [t for part in pool.map(_fit_tree_range, jobs) for t in part]
    return Forest(trees=tuple(trees), p=p, config=config)
