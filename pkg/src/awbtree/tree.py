"""Regression trees over chromaticity targets.

Two tree families share one CART-style construction:

* multivariate trees (`fit_mv`) predict a whole chromaticity per leaf
  and choose splits that minimize the summed white-balance distance of
  each side to its own leaf estimate;
* univariate trees (`fit_uv`) predict a single scalar per leaf with the
  ordinary squared-error criterion, and are the building block of the
  per-channel baseline.

Candidate thresholds are midpoints between consecutive distinct sorted
feature values; branching is `x <= p` left, `x > p` right.  Split
selection can be randomized: all candidates whose cost is within
`rand_pct` percent of the minimum form a pool and one is drawn
uniformly.  With `rand_pct == 0` the argmin is returned, ties broken by
smallest feature index then smallest threshold, which makes fitting
fully deterministic for a fixed seed.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass

import numpy as np

from .chroma import Chromaticity, DistanceMeasure, distance_matrix
from .errors import DimensionError, EmptySet
from .minimize import approx_minimize

__all__ = [
    "LabeledExample",
    "FitParams",
    "Leaf",
    "Internal",
    "enumerate_splits",
    "best_split_mv",
    "best_split_uv",
    "fit_mv",
    "fit_uv",
    "predict_mv",
    "predict_uv",
    "count_nodes",
    "as_xy",
]


@dataclass(frozen=True)
class LabeledExample:
    """One training image: its feature vector and ground-truth illuminant."""

    features: np.ndarray
    truth: Chromaticity


@dataclass(frozen=True)
class FitParams:
    """Tree-growing parameters.

    A node is split only while it holds at least `min_parent_size`
    examples and (multivariate trees only) its average error exceeds
    `error_threshold`, expressed in the fitted measure's own units.
    Children must each receive at least `min_leaf_size` examples.
    """

    min_parent_size: int = 10
    min_leaf_size: int = 1
    error_threshold: float = 0.5
    rand_pct: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.min_leaf_size < 1:
            raise ValueError("min_leaf_size must be at least 1")
        if self.min_parent_size < 2 * self.min_leaf_size:
            raise ValueError("min_parent_size must be at least 2 * min_leaf_size")
        if self.rand_pct < 0:
            raise ValueError("rand_pct must be nonnegative")


@dataclass(frozen=True)
class Leaf:
    """Terminal node; `estimate` is a Chromaticity for multivariate trees
    and a plain float for univariate trees."""

    estimate: object
    count: int


@dataclass(frozen=True)
class Internal:
    feature: int
    threshold: float
    left: object
    right: object


def as_xy(examples) -> tuple[np.ndarray, np.ndarray]:
    """Coerce a dataset to (X, Y) float arrays.

    Accepts either an (X, Y) pair of arrays or a sequence of
    `LabeledExample`.  Y rows are chromaticities for multivariate use or
    scalars for univariate use.
    """
    if isinstance(examples, tuple) and len(examples) == 2:
        X = np.asarray(examples[0], dtype=float)
        Y = np.asarray(examples[1], dtype=float)
        return X, Y
    items = list(examples)
    if not items:
        raise EmptySet("no training examples")
    X = np.stack([np.asarray(e.features, dtype=float) for e in items])
    Y = np.stack([e.truth.as_array() for e in items])
    return X, Y


def enumerate_splits(examples, feature: int, min_leaf_size: int = 1):
    """All candidate splits of `examples` on one feature.

    Returns a list of ``(threshold, left_indices, right_indices)`` in
    ascending threshold order.  Thresholds are midpoints between
    consecutive distinct sorted values; splits leaving either side with
    fewer than `min_leaf_size` examples are dropped.  A constant feature
    yields an empty list.
    """
    X, _ = as_xy(examples)
    v = X[:, feature]
    n = len(v)
    order = np.argsort(v, kind="stable")
    vs = v[order]
    out = []
    for k in range(1, n):
        if vs[k - 1] == vs[k]:
            continue
        if k < min_leaf_size or n - k < min_leaf_size:
            continue
        p = 0.5 * (vs[k - 1] + vs[k])
        out.append((float(p), np.sort(order[:k]), np.sort(order[k:])))
    return out


def _prefix_medians(values: np.ndarray) -> np.ndarray:
    """Medians of values[:k] for k = 1 .. n-1, via an insertion-sorted
    running buffer (C-speed memmoves, O(n^2) worst case but tiny
    constants at node sizes seen here)."""
    seq = values.tolist()
    n = len(seq)
    out = np.empty(n - 1)
    buf: list[float] = []
    for k in range(1, n):
        insort(buf, seq[k - 1])
        half = k >> 1
        out[k - 1] = buf[half] if k & 1 else 0.5 * (buf[half - 1] + buf[half])
    return out


def _scan_feature_mv(xj, Y, m, min_leaf_size):
    """Vectorized split scan on one feature for multivariate targets.

    For every valid split position the left/right leaf estimates are the
    renormalized componentwise medians of each side, and the candidate
    cost is the summed distance of each side to its own estimate.
    Returns (thresholds, costs) in ascending threshold order, or None.
    """
    n = len(xj)
    order = np.argsort(xj, kind="stable")
    v = xj[order]
    ks = np.nonzero(v[:-1] < v[1:])[0] + 1
    ks = ks[(ks >= min_leaf_size) & (ks <= n - min_leaf_size)]
    if ks.size == 0:
        return None
    Ys = Y[order]
    med_left = np.column_stack([_prefix_medians(Ys[:, c]) for c in range(3)])
    med_right = np.column_stack([_prefix_medians(Ys[::-1, c]) for c in range(3)])
    est_left = med_left / med_left.sum(axis=1, keepdims=True)
    est_right = med_right / med_right.sum(axis=1, keepdims=True)

    EL = est_left[ks - 1]
    ER = est_right[n - ks - 1]
    cs_left = np.cumsum(distance_matrix(m, EL, Ys), axis=1)
    cs_right = np.cumsum(distance_matrix(m, ER, Ys), axis=1)
    rows = np.arange(ks.size)
    cost = cs_left[rows, ks - 1] + (cs_right[rows, n - 1] - cs_right[rows, ks - 1])
    thresholds = 0.5 * (v[ks - 1] + v[ks])
    return thresholds, cost


def _scan_feature_uv(xj, y, min_leaf_size):
    """Squared-error split scan on one feature via prefix sums."""
    n = len(xj)
    order = np.argsort(xj, kind="stable")
    v = xj[order]
    ks = np.nonzero(v[:-1] < v[1:])[0] + 1
    ks = ks[(ks >= min_leaf_size) & (ks <= n - min_leaf_size)]
    if ks.size == 0:
        return None
    ys = y[order]
    s1 = np.cumsum(ys)
    s2 = np.cumsum(ys * ys)
    left = s2[ks - 1] - s1[ks - 1] ** 2 / ks
    right = (s2[-1] - s2[ks - 1]) - (s1[-1] - s1[ks - 1]) ** 2 / (n - ks)
    cost = np.maximum(left, 0.0) + np.maximum(right, 0.0)
    thresholds = 0.5 * (v[ks - 1] + v[ks])
    return thresholds, cost


def _choose_candidate(js, ps, costs, params: FitParams, rng):
    """Pick a split from candidates already ordered by (feature, threshold)."""
    best = int(np.argmin(costs))
    if params.rand_pct == 0.0:
        pick = best
    else:
        margin = (1.0 + params.rand_pct / 100.0) * costs[best]
        pool = np.nonzero(costs <= margin)[0]
        pick = int(pool[rng.integers(pool.size)])
    return int(js[pick]), float(ps[pick]), float(costs[pick])


def _collect_candidates(X, scan, feature_indices):
    js, ps, costs = [], [], []
    for j in feature_indices:
        res = scan(X[:, j])
        if res is None:
            continue
        t, c = res
        js.append(np.full(t.size, j))
        ps.append(t)
        costs.append(c)
    if not js:
        return None
    return np.concatenate(js), np.concatenate(ps), np.concatenate(costs)


def best_split_mv(
    examples,
    m: DistanceMeasure,
    params: FitParams,
    rng=None,
    feature_indices=None,
    minimizer=None,
):
    """Best (feature, threshold) for a multivariate node, or None.

    With the default `minimizer` (the median approximation) the scan is
    vectorized.  Passing a callable ``minimizer(targets) -> cost``
    switches to an explicit per-candidate loop, used to cross-check the
    fast path against exact optimization on small inputs.
    """
    X, Y = as_xy(examples)
    if rng is None:
        rng = np.random.default_rng(params.seed)
    if feature_indices is None:
        feature_indices = range(X.shape[1])

    if minimizer is None:
        scan = lambda xj: _scan_feature_mv(xj, Y, m, params.min_leaf_size)
        cands = _collect_candidates(X, scan, feature_indices)
    else:
        js, ps, costs = [], [], []
        for j in feature_indices:
            for p, left, right in enumerate_splits((X, Y), j, params.min_leaf_size):
                js.append(j)
                ps.append(p)
                costs.append(minimizer(Y[left]) + minimizer(Y[right]))
        cands = (np.array(js), np.array(ps), np.array(costs)) if js else None

    if cands is None:
        return None
    return _choose_candidate(*cands, params, rng)


def best_split_uv(examples, params: FitParams, rng=None, feature_indices=None):
    """Best (feature, threshold) under squared error, or None."""
    X, y = as_xy(examples)
    if rng is None:
        rng = np.random.default_rng(params.seed)
    if feature_indices is None:
        feature_indices = range(X.shape[1])
    scan = lambda xj: _scan_feature_uv(xj, y, params.min_leaf_size)
    cands = _collect_candidates(X, scan, feature_indices)
    if cands is None:
        return None
    return _choose_candidate(*cands, params, rng)


def _grow_mv(X, Y, m, params, rng, feature_indices):
    n = len(Y)
    node = approx_minimize(Y, m)
    if n < params.min_parent_size or node.cost / n <= params.error_threshold:
        return Leaf(node.estimate, n)
    split = best_split_mv((X, Y), m, params, rng, feature_indices)
    if split is None:
        return Leaf(node.estimate, n)
    j, p, _ = split
    mask = X[:, j] <= p
    left = _grow_mv(X[mask], Y[mask], m, params, rng, feature_indices)
    right = _grow_mv(X[~mask], Y[~mask], m, params, rng, feature_indices)
    return Internal(j, p, left, right)


def fit_mv(examples, m: DistanceMeasure, params: FitParams, rng=None, feature_indices=None):
    """Grow a multivariate regression tree.

    Recursion stops at a node when it has fewer than `min_parent_size`
    examples, its average error is at most `error_threshold`, or no
    valid split exists; the node then becomes a leaf labeled with the
    renormalized componentwise median of its truths.
    """
    X, Y = as_xy(examples)
    if len(Y) == 0:
        raise EmptySet("no training examples")
    if rng is None:
        rng = np.random.default_rng(params.seed)
    if feature_indices is None:
        feature_indices = tuple(range(X.shape[1]))
    return _grow_mv(X, Y, m, params, rng, feature_indices)


def _grow_uv(X, y, params, rng, feature_indices):
    n = len(y)
    if n < params.min_parent_size or np.all(y == y[0]):
        return Leaf(float(y.mean()), n)
    split = best_split_uv((X, y), params, rng, feature_indices)
    if split is None:
        return Leaf(float(y.mean()), n)
    j, p, _ = split
    mask = X[:, j] <= p
    left = _grow_uv(X[mask], y[mask], params, rng, feature_indices)
    right = _grow_uv(X[~mask], y[~mask], params, rng, feature_indices)
    return Internal(j, p, left, right)


def fit_uv(examples, params: FitParams, rng=None, feature_indices=None):
    """Grow a univariate squared-error tree over scalar responses.

    Stopping uses only the size limits plus purity (a node whose
    responses are all identical becomes a leaf); leaves are labeled with
    the mean response.
    """
    X, y = as_xy(examples)
    if len(y) == 0:
        raise EmptySet("no training examples")
    if rng is None:
        rng = np.random.default_rng(params.seed)
    if feature_indices is None:
        feature_indices = tuple(range(X.shape[1]))
    return _grow_uv(X, y, params, rng, feature_indices)


def _descend(tree, features):
    x = np.asarray(features, dtype=float).ravel()
    node = tree
    while isinstance(node, Internal):
        if node.feature >= x.size:
            raise DimensionError(
                f"tree tests feature {node.feature} but input has {x.size}"
            )
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node


def predict_mv(tree, features) -> Chromaticity:
    """Route a feature vector to a leaf and return its chromaticity."""
    return _descend(tree, features).estimate


def predict_uv(tree, features) -> float:
    """Route a feature vector to a leaf and return its scalar estimate."""
    return _descend(tree, features).estimate


def count_nodes(tree) -> int:
    """Total number of nodes (internal plus leaf) in a tree."""
    if isinstance(tree, Leaf):
        return 1
    return 1 + count_nodes(tree.left) + count_nodes(tree.right)
