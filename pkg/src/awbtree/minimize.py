"""Minimize the summed distance from one chromaticity to a target set.

Tree fitting, leaf labeling, and ensemble combination all solve the same
constrained problem: find the chromaticity that minimizes the sum of a
chosen distance measure over a set of target chromaticities.  Solving it
exactly is too slow to run tens of thousands of times per tree, so the
production path (`approx_minimize`) takes the componentwise median of
the targets and renormalizes onto the simplex.  `exact_minimize` is a
deterministic grid-refinement oracle used for testing and for measuring
the approximation error; it is not called during training or prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chroma import EPS_DIV, Chromaticity, DistanceMeasure, distance_matrix, normalize
from .errors import EmptySet

APPROX_MEDIAN = "approx_median"
MEAN = "mean"
EXACT_NUMERIC = "exact_numeric"


@dataclass(frozen=True)
class MinimizeResult:
    estimate: Chromaticity
    cost: float
    method: str


def as_target_array(targets) -> np.ndarray:
    """Coerce a target collection to an (n, 3) float array."""
    if isinstance(targets, np.ndarray) and targets.ndim == 2:
        arr = np.asarray(targets, dtype=float)
    else:
        rows = [t.as_array() if isinstance(t, Chromaticity) else np.asarray(t, dtype=float)
                for t in targets]
        if not rows:
            raise EmptySet("no targets to minimize over")
        arr = np.stack(rows)
    if arr.shape[0] == 0:
        raise EmptySet("no targets to minimize over")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"targets must be RGB triples, got shape {arr.shape}")
    return arr


def total_cost(candidate, targets, m: DistanceMeasure) -> float:
    """Sum of distances from `candidate` to every target."""
    T = as_target_array(targets)
    return float(distance_matrix(m, candidate, T).sum())


def approx_minimize(targets, m: DistanceMeasure) -> MinimizeResult:
    """Componentwise median of the targets, renormalized onto the simplex.

    Fast enough for the inner loop of tree fitting and usually within a
    percent of the exact optimum.  The estimate does not depend on the
    measure; only the reported cost does.
    """
    T = as_target_array(targets)
    est = normalize(np.median(T, axis=0))
    return MinimizeResult(est, total_cost(est, T, m), APPROX_MEDIAN)


def mean_minimize(targets, m: DistanceMeasure) -> MinimizeResult:
    """Componentwise mean of the targets (already on the simplex)."""
    T = as_target_array(targets)
    est = normalize(T.mean(axis=0))
    return MinimizeResult(est, total_cost(est, T, m), MEAN)


def _grid_eval(m: DistanceMeasure, rg: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Summed cost at each (r, g) candidate; rows violating the simplex
    are given infinite cost."""
    b = 1.0 - rg.sum(axis=1)
    ok = (rg[:, 0] >= EPS_DIV) & (rg[:, 1] >= EPS_DIV) & (b >= EPS_DIV)
    costs = np.full(len(rg), np.inf)
    if ok.any():
        cand = np.column_stack([rg[ok], b[ok]])
        costs[ok] = distance_matrix(m, cand, T).sum(axis=1)
    return costs


def exact_minimize(
    targets,
    m: DistanceMeasure,
    coarse_step: float = 1e-3,
    final_step: float = 1e-7,
    margin: float = 0.05,
) -> MinimizeResult:
    """Numerically minimize the summed distance over the 2-simplex.

    Coarse grid search with `coarse_step` spacing in (r, g) over the
    targets' bounding box expanded by `margin`, then local refinement:
    the step is halved and the 3x3 neighborhood of the incumbent is
    re-searched until the step drops below `final_step`.  Deterministic;
    ties go to the lowest grid index.  Candidates are kept a hair inside
    the simplex so the reproduction measure stays defined.
    """
    T = as_target_array(targets)
    lo = np.maximum(T[:, :2].min(axis=0) - margin, EPS_DIV)
    hi = np.minimum(T[:, :2].max(axis=0) + margin, 1.0 - 2.0 * EPS_DIV)
    r_vals = np.arange(lo[0], hi[0] + 0.5 * coarse_step, coarse_step)
    g_vals = np.arange(lo[1], hi[1] + 0.5 * coarse_step, coarse_step)
    rr, gg = np.meshgrid(r_vals, g_vals, indexing="ij")
    grid = np.column_stack([rr.ravel(), gg.ravel()])
    costs = _grid_eval(m, grid, T)
    best_idx = int(np.argmin(costs))
    best_rg = grid[best_idx]
    best_cost = costs[best_idx]

    offsets = np.array([(dr, dg) for dr in (-1, 0, 1) for dg in (-1, 0, 1)], dtype=float)
    step = 0.5 * coarse_step
    while step >= final_step:
        neigh = best_rg + offsets * step
        costs = _grid_eval(m, neigh, T)
        idx = int(np.argmin(costs))
        if costs[idx] < best_cost:
            best_cost = costs[idx]
            best_rg = neigh[idx]
        step *= 0.5

    b = 1.0 - best_rg.sum()
    est = normalize((best_rg[0], best_rg[1], b))
    return MinimizeResult(est, total_cost(est, T, m), EXACT_NUMERIC)
