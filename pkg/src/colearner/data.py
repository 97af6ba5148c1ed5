"""Core data containers for treatment/control observations.

A Dataset is an ordered collection of samples over a shared feature
dimension m. Containers are frozen; feature arrays are copied on
construction and marked read-only so fitted objects can be shared freely
across threads/processes.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DimensionError, EmptySetError, InvalidDatasetError


def _frozen_vector(values, length: int | None = None) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {v.shape}")
    if length is not None and v.size != length:
        raise DimensionError(f"expected length {length}, got {v.size}")
    v = v.copy()
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class Sample:
    """One observation: covariates, binary treatment flag, outcome."""

    features: np.ndarray
    treatment: int
    outcome: float

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen_vector(self.features))
        if self.treatment not in (0, 1):
            raise InvalidDatasetError(f"treatment must be 0 or 1, got {self.treatment!r}")
        if not np.isfinite(self.features).all():
            raise InvalidDatasetError("sample features must be finite")
        if not np.isfinite(self.outcome):
            raise InvalidDatasetError(f"outcome must be finite, got {self.outcome!r}")
        object.__setattr__(self, "treatment", int(self.treatment))
        object.__setattr__(self, "outcome", float(self.outcome))


@dataclass(frozen=True)
class Dataset:
    """Ordered samples over a shared feature dimension m."""

    samples: tuple[Sample, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if self.m < 1:
            raise InvalidDatasetError(f"m must be positive, got {self.m}")
        if not self.samples:
            raise InvalidDatasetError("dataset has no samples")
        for s in self.samples:
            if s.features.size != self.m:
                raise DimensionError(
                    f"sample has {s.features.size} features, dataset m is {self.m}"
                )

    @classmethod
    def from_arrays(cls, features, treatments, outcomes) -> "Dataset":
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2:
            raise DimensionError(f"features must be 2-d, got shape {x.shape}")
        t = np.asarray(treatments)
        y = np.asarray(outcomes, dtype=np.float64)
        if not (len(x) == len(t) == len(y)):
            raise DimensionError("features, treatments and outcomes must have equal length")
        samples = tuple(
            Sample(features=x[i], treatment=int(t[i]), outcome=float(y[i]))
            for i in range(len(x))
        )
        return cls(samples=samples, m=x.shape[1])

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def n0(self) -> int:
        return sum(1 for s in self.samples if s.treatment == 0)

    @property
    def n1(self) -> int:
        return sum(1 for s in self.samples if s.treatment == 1)

    def features_matrix(self) -> np.ndarray:
        return np.stack([s.features for s in self.samples])

    def treatments(self) -> np.ndarray:
        return np.array([s.treatment for s in self.samples], dtype=np.int64)

    def outcomes(self) -> np.ndarray:
        return np.array([s.outcome for s in self.samples], dtype=np.float64)


def split_groups(d: Dataset) -> tuple[tuple[Sample, ...], tuple[Sample, ...]]:
    """Partition into (controls, treated), each in dataset order.

    Raises InvalidDatasetError when either group is empty: every fitting
    routine here needs both groups.
    """
    controls = tuple(s for s in d.samples if s.treatment == 0)
    treated = tuple(s for s in d.samples if s.treatment == 1)
    if not controls or not treated:
        raise InvalidDatasetError(
            f"both groups must be non-empty, got n0={len(controls)}, n1={len(treated)}"
        )
    return controls, treated


def group_arrays(samples: Sequence[Sample]) -> tuple[np.ndarray, np.ndarray]:
    """(features matrix, outcome vector) for a group of samples."""
    x = np.stack([s.features for s in samples])
    y = np.array([s.outcome for s in samples], dtype=np.float64)
    return x, y


def concat_features(a, b) -> np.ndarray:
    """Join two equal-length feature vectors into one of twice the length.

    Injective on pairs: the halves can always be recovered by splitting at
    the midpoint.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.ndim != 1 or bv.ndim != 1:
        raise DimensionError("concat_features expects 1-d vectors")
    if av.size != bv.size:
        raise DimensionError(f"length mismatch: {av.size} vs {bv.size}")
    return np.concatenate([av, bv])


@dataclass(frozen=True)
class ConcatExample:
    """Training example over a concatenated (treatment, control) feature pair."""

    z: np.ndarray
    target: float
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "z", _frozen_vector(self.z))
        if not np.isfinite(self.z).all():
            raise InvalidDatasetError("z must be finite")
        if not np.isfinite(self.target):
            raise InvalidDatasetError(f"target must be finite, got {self.target!r}")
        if not (self.weight > 0 and np.isfinite(self.weight)):
            raise InvalidDatasetError(f"weight must be positive and finite, got {self.weight!r}")
        object.__setattr__(self, "target", float(self.target))
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class ConcatSet:
    """Collection of ConcatExamples over a shared base dimension m (z has 2m entries)."""

    examples: tuple[ConcatExample, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        if self.m < 1:
            raise InvalidDatasetError(f"m must be positive, got {self.m}")
        for e in self.examples:
            if e.z.size != 2 * self.m:
                raise DimensionError(f"z has length {e.z.size}, expected {2 * self.m}")

    def __len__(self) -> int:
        return len(self.examples)

    def z_matrix(self) -> np.ndarray:
        return np.stack([e.z for e in self.examples])

    def targets(self) -> np.ndarray:
        return np.array([e.target for e in self.examples], dtype=np.float64)

    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.examples], dtype=np.float64)


def normalize_weights(s: ConcatSet) -> ConcatSet:
    """Rescale weights so their mean is 1. Ratios between weights are preserved."""
    if not s.examples:
        raise EmptySetError("cannot normalize an empty set")
    w = s.weights()
    factor = len(s) / float(w.sum())
    examples = tuple(replace(e, weight=e.weight * factor) for e in s.examples)
    return ConcatSet(examples=examples, m=s.m)


def normalized_weight_array(w: np.ndarray) -> np.ndarray:
    """Array-level counterpart of normalize_weights (mean becomes 1)."""
    if w.size == 0:
        raise EmptySetError("cannot normalize an empty weight vector")
    return w * (w.size / float(w.sum()))
