"""Minkowski-family metrics, neighbor queries and ball sampling.

Candidate pools here are small (hundreds of points), so neighbor queries are
brute-force scans; no spatial index is needed or wanted.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError

DEFAULT_WEIGHT_FLOOR = 1e-6


@dataclass(frozen=True)
class Metric:
    """Minkowski metric of order p >= 1. p=1 Manhattan, p=2 Euclidean."""

    p: float

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p >= 1):
            raise ParameterError(f"metric order must be finite and >= 1, got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def euclidean(cls) -> "Metric":
        return cls(p=2.0)

    @classmethod
    def manhattan(cls) -> "Metric":
        return cls(p=1.0)

    @classmethod
    def minkowski(cls, p: float) -> "Metric":
        return cls(p=p)

    @property
    def kind(self) -> str:
        if self.p == 1.0:
            return "manhattan"
        if self.p == 2.0:
            return "euclidean"
        return f"minkowski({self.p:g})"


EUCLIDEAN = Metric.euclidean()
MANHATTAN = Metric.manhattan()


def dist(a, b, metric: Metric = EUCLIDEAN) -> float:
    """Distance between two equal-length vectors."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape or av.ndim != 1:
        raise DimensionError(f"expected equal-length 1-d vectors, got {av.shape} and {bv.shape}")
    return float(_norms(av[None, :] - bv[None, :], metric)[0])


def _norms(diffs: np.ndarray, metric: Metric) -> np.ndarray:
    """Row-wise Minkowski norms of a 2-d array of differences."""
    a = np.abs(diffs)
    if metric.p == 1.0:
        return a.sum(axis=1)
    if metric.p == 2.0:
        return np.sqrt((a * a).sum(axis=1))
    return (a ** metric.p).sum(axis=1) ** (1.0 / metric.p)


def distances_to(x, pool, metric: Metric = EUCLIDEAN) -> np.ndarray:
    """Distances from a query vector to every row of a pool matrix."""
    xv = np.asarray(x, dtype=np.float64)
    pm = np.asarray(pool, dtype=np.float64)
    if pm.ndim != 2 or xv.ndim != 1 or pm.shape[1] != xv.size:
        raise DimensionError(
            f"pool must be (n, m) and query (m,), got {pm.shape} and {xv.shape}"
        )
    return _norms(pm - xv[None, :], metric)


def neighbors_within(x, pool, radius: float, metric: Metric = EUCLIDEAN) -> np.ndarray:
    """Indices of pool rows with distance <= radius, in ascending index order."""
    if not (np.isfinite(radius) and radius >= 0):
        raise ParameterError(f"radius must be finite and >= 0, got {radius!r}")
    d = distances_to(x, pool, metric)
    return np.nonzero(d <= radius)[0]


def k_nearest(x, pool, k: int, metric: Metric = EUCLIDEAN) -> np.ndarray:
    """Indices of the k closest pool rows, nearest first; distance ties go to the lower index."""
    d = distances_to(x, pool, metric)
    if not 1 <= k <= d.size:
        raise ParameterError(f"k must be in [1, {d.size}], got {k}")
    order = np.argsort(d, kind="stable")
    return order[:k]


def weight_from_distance(d: float, floor: float = DEFAULT_WEIGHT_FLOOR) -> float:
    """Inverse-distance weight 1 / max(d, floor); the floor caps weights near zero distance."""
    if not (floor > 0 and np.isfinite(floor)):
        raise ParameterError(f"floor must be positive and finite, got {floor!r}")
    if not (d >= 0 and np.isfinite(d)):
        raise ParameterError(f"distance must be finite and >= 0, got {d!r}")
    return 1.0 / max(d, floor)


def sample_in_ball(m: int, radius: float, metric: Metric, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the m-dimensional metric ball of the given radius.

    Direction comes from the generalized-normal construction (component
    magnitudes are Gamma(1/p) raised to 1/p with random signs, normalized to
    unit p-norm), which is uniform on the metric sphere for every p >= 1 and
    reduces to the normalized-Gaussian method at p=2. The radius is scaled by
    U^(1/m) so volume is filled uniformly.
    """
    if m < 1:
        raise ParameterError(f"dimension must be positive, got {m}")
    if not (radius >= 0 and np.isfinite(radius)):
        raise ParameterError(f"radius must be finite and >= 0, got {radius!r}")
    while True:
        g = rng.gamma(1.0 / metric.p, 1.0, size=m) ** (1.0 / metric.p)
        signs = rng.integers(0, 2, size=m) * 2 - 1
        v = g * signs
        norm = _norms(v[None, :], metric)[0]
        if norm > 0:
            break
    u = rng.random()
    return v * (radius * u ** (1.0 / m) / norm)
