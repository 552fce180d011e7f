"""Chromaticity coordinates and distance measures for white balancing.

An illuminant is represented by its normalized RGB chromaticity, a point
on the unit 2-simplex (r + g + b = 1).  Five distance measures are
supported for comparing an estimated illuminant against a ground truth:

* ``recovery``      - angle in degrees between the two vectors.
* ``reproduction``  - angle in degrees between the corrected ground truth
  and uniform gray, after applying the diagonal correction implied by the
  estimate.  Not symmetric in its arguments.
* ``taxicab``       - sum of absolute channel differences.
* ``euclidean``     - root of the sum of squared channel differences.
* ``ped``           - perceptual Euclidean: channel-weighted Euclidean
  distance, default weights (0.21, 0.71, 0.08).

All operations are pure and thread-safe; `Chromaticity` and
`DistanceMeasure` are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEstimate, InvalidChromaticity

# Smallest estimate channel the reproduction error will divide by.
EPS_DIV = 1e-9

# Tolerance on r + g + b = 1 for a valid chromaticity.
SIMPLEX_TOL = 1e-9

RECOVERY = "recovery"
REPRODUCTION = "reproduction"
TAXICAB = "taxicab"
EUCLIDEAN = "euclidean"
PERCEPTUAL_EUCLIDEAN = "ped"

MEASURE_KINDS = (RECOVERY, REPRODUCTION, TAXICAB, EUCLIDEAN, PERCEPTUAL_EUCLIDEAN)
ANGULAR_KINDS = (RECOVERY, REPRODUCTION)

# Channel sensitivity weights of the perceptual Euclidean error.
DEFAULT_PERCEPTUAL_WEIGHTS = (0.21, 0.71, 0.08)

_RAD2DEG = 180.0 / math.pi
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Chromaticity:
    """A normalized RGB triple with r + g + b = 1 and no negative channel."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        if self.r < 0.0 or self.g < 0.0 or self.b < 0.0:
            raise InvalidChromaticity(
                f"negative channel in ({self.r}, {self.g}, {self.b})"
            )
        total = self.r + self.g + self.b
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise InvalidChromaticity(
                f"channels sum to {total!r}, expected 1 within {SIMPLEX_TOL}"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=float)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)


def normalize(v) -> Chromaticity:
    """Project a nonnegative RGB triple onto the unit simplex.

    Each channel is divided by the channel sum.  Raises
    `InvalidChromaticity` if any channel is negative or the sum is not
    strictly positive.
    """
    r, g, b = (float(x) for x in v)
    if r < 0.0 or g < 0.0 or b < 0.0:
        raise InvalidChromaticity(f"negative channel in ({r}, {g}, {b})")
    total = r + g + b
    if not total > 0.0:
        raise InvalidChromaticity("channel sum must be strictly positive")
    return Chromaticity(r / total, g / total, b / total)


@dataclass(frozen=True)
class DistanceMeasure:
    """One of the five supported distance measures.

    `weights` is used only by the perceptual Euclidean measure; the three
    weights must be nonnegative and sum to one.
    """

    kind: str
    weights: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise ValueError(
                f"unknown measure {self.kind!r}, expected one of {MEASURE_KINDS}"
            )
        if self.kind == PERCEPTUAL_EUCLIDEAN:
            w = self.weights if self.weights is not None else DEFAULT_PERCEPTUAL_WEIGHTS
            w = tuple(float(x) for x in w)
            if len(w) != 3 or any(x < 0.0 for x in w):
                raise ValueError("perceptual weights must be three nonnegative values")
            if abs(sum(w) - 1.0) > 1e-9:
                raise ValueError("perceptual weights must sum to 1")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ValueError(f"measure {self.kind!r} takes no weights")

    @property
    def is_angular(self) -> bool:
        return self.kind in ANGULAR_KINDS

    @property
    def is_symmetric(self) -> bool:
        return self.kind != REPRODUCTION


def measure(kind: str, weights=None) -> DistanceMeasure:
    """Convenience constructor, e.g. ``measure("recovery")``."""
    if weights is not None and kind != PERCEPTUAL_EUCLIDEAN:
        raise ValueError(f"measure {kind!r} takes no weights")
    return DistanceMeasure(kind, tuple(weights) if weights is not None else None)


def _as_rows(x) -> np.ndarray:
    if isinstance(x, Chromaticity):
        return x.as_array()[None, :]
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] != 3:
        raise InvalidChromaticity(f"expected RGB triples, got shape {a.shape}")
    return a


def distance_matrix(m: DistanceMeasure, estimates, truths) -> np.ndarray:
    """Distances from each estimate (rows) to each truth (columns).

    Returns a (k, n) array for k estimates and n truths.  Angular
    measures are in degrees; the arccos argument is clamped to [-1, 1]
    to absorb round-off.  For the reproduction measure every estimate
    channel must be at least `EPS_DIV`.
    """
    E = _as_rows(estimates)
    T = _as_rows(truths)
    if m.kind == RECOVERY:
        num = E @ T.T
        den = np.linalg.norm(E, axis=1)[:, None] * np.linalg.norm(T, axis=1)[None, :]
        return np.arccos(np.clip(num / den, -1.0, 1.0)) * _RAD2DEG
    if m.kind == REPRODUCTION:
        if np.any(E < EPS_DIV):
            raise DegenerateEstimate(
                f"estimate channel below {EPS_DIV}; reproduction error undefined"
            )
        ratios = T[None, :, :] / E[:, None, :]
        num = ratios.sum(axis=2)
        den = np.sqrt((ratios * ratios).sum(axis=2)) * _SQRT3
        return np.arccos(np.clip(num / den, -1.0, 1.0)) * _RAD2DEG
    diff = E[:, None, :] - T[None, :, :]
    if m.kind == TAXICAB:
        return np.abs(diff).sum(axis=2)
    if m.kind == EUCLIDEAN:
        return np.sqrt((diff * diff).sum(axis=2))
    w = np.asarray(m.weights, dtype=float)
    return np.sqrt((w * diff * diff).sum(axis=2))


def distance(m: DistanceMeasure, est, truth) -> float:
    """Distance between one estimate and one ground truth."""
    return float(distance_matrix(m, est, truth)[0, 0])
