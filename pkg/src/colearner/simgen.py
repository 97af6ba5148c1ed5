"""Synthetic data generator for the benchmark scenarios.

Three response families over correlated Gaussian covariates:

* sim1: linear control response with a step, jump-style treatment effect.
    g0(x) = x . beta + 5 * 1[x_1 > 0.5],   g1(x) = g0(x) + 8 * sum_k 1[x_k > 0.1]
  with beta ~ Uniform[-5, 5]^m and the k ranging over M distinct jump
  features drawn uniformly without replacement each repetition.
* sim2: smooth nonlinear control response, same jump-style effect.
    g0(x) = eps(x_1) * eps(x_2) / 2,       g1(x) = g0(x) + 8 * sum_k 1[x_k > 0.1]
* sim3: smooth effect that flips the sign of the control response.
    g0(x) = eps(x_1) * eps(x_2) / 2,       g1(x) = -g0(x)

where eps(v) = 2 / (1 + exp(-12 (v - 0.5))).

Covariates are zero-mean multivariate normal with a random correlation
matrix drawn by the C-vine construction (partial correlations uniform on
(-1, 1)), one matrix per repetition. Standard-normal marginals keep both
indicator thresholds non-degenerate (P[x > 0.5] ~ 0.31, P[x > 0.1] ~ 0.46).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DimensionError, NumericError, ParameterError

SCENARIO_KINDS = ("sim1", "sim2", "sim3")

_JITTERS = (0.0, 1e-12, 1e-10, 1e-8)


def scaled_logistic(v):
    """eps(v) = 2 / (1 + exp(-12 (v - 0.5))); eps(0.5) = 1, range (0, 2)."""
    return 2.0 / (1.0 + np.exp(-12.0 * (np.asarray(v, dtype=np.float64) - 0.5)))


@dataclass(frozen=True)
class Scenario:
    """One realized scenario: kind plus the per-repetition draws it needs."""

    kind: str
    jump_indices: np.ndarray | None = None
    beta: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ParameterError(f"kind must be one of {SCENARIO_KINDS}, got {self.kind!r}")
        if self.kind == "sim3":
            if self.jump_indices is not None or self.beta is not None:
                raise ParameterError("sim3 takes no jump indices or beta")
            return
        if self.jump_indices is None:
            raise ParameterError(f"{self.kind} needs jump indices")
        ji = np.asarray(self.jump_indices, dtype=np.int64).copy()
        if ji.ndim != 1 or len(np.unique(ji)) != ji.size or (ji < 0).any():
            raise ParameterError("jump indices must be distinct non-negative integers")
        ji.flags.writeable = False
        object.__setattr__(self, "jump_indices", ji)
        if self.kind == "sim1":
            if self.beta is None:
                raise ParameterError("sim1 needs beta")
            b = np.asarray(self.beta, dtype=np.float64).copy()
            if b.ndim != 1:
                raise DimensionError("beta must be a vector")
            b.flags.writeable = False
            object.__setattr__(self, "beta", b)
        elif self.beta is not None:
            raise ParameterError("sim2 takes no beta")


def draw_scenario(kind: str, m: int, n_jumps: int, rng: np.random.Generator) -> Scenario:
    """Draw the per-repetition scenario parameters (jump features, beta)."""
    if kind not in SCENARIO_KINDS:
        raise ParameterError(f"kind must be one of {SCENARIO_KINDS}, got {kind!r}")
    if m < 1:
        raise ParameterError(f"m must be positive, got {m}")
    if kind in ("sim2", "sim3") and m < 2:
        raise ParameterError(f"{kind} needs m >= 2, got {m}")
    if kind == "sim3":
        return Scenario(kind="sim3")
    if not 1 <= n_jumps <= m:
        raise ParameterError(f"n_jumps must be in [1, {m}], got {n_jumps}")
    jumps = np.sort(rng.choice(m, size=n_jumps, replace=False))
    beta = rng.uniform(-5.0, 5.0, size=m) if kind == "sim1" else None
    return Scenario(kind=kind, jump_indices=jumps, beta=beta)


def _check_xs(s: Scenario, xs: np.ndarray) -> np.ndarray:
    xm = np.asarray(xs, dtype=np.float64)
    if xm.ndim != 2:
        raise DimensionError(f"expected a 2-d feature matrix, got shape {xm.shape}")
    m = xm.shape[1]
    if s.kind == "sim1" and s.beta.size != m:
        raise DimensionError(f"beta has length {s.beta.size}, features have {m}")
    if s.kind in ("sim2", "sim3") and m < 2:
        raise DimensionError(f"{s.kind} needs at least 2 features, got {m}")
    if s.jump_indices is not None and s.jump_indices.size and s.jump_indices.max() >= m:
        raise DimensionError("jump index out of feature range")
    return xm


def _jump_term(s: Scenario, xm: np.ndarray) -> np.ndarray:
    return 8.0 * (xm[:, s.jump_indices] > 0.1).sum(axis=1).astype(np.float64)


def control_response_batch(s: Scenario, xs) -> np.ndarray:
    xm = _check_xs(s, xs)
    if s.kind == "sim1":
        return xm @ s.beta + 5.0 * (xm[:, 0] > 0.5)
    return scaled_logistic(xm[:, 0]) * scaled_logistic(xm[:, 1]) / 2.0


def treatment_response_batch(s: Scenario, xs) -> np.ndarray:
    base = control_response_batch(s, xs)
    if s.kind == "sim3":
        return -base
    return base + _jump_term(s, _check_xs(s, xs))


def true_cate_batch(s: Scenario, xs) -> np.ndarray:
    xm = _check_xs(s, xs)
    if s.kind == "sim3":
        return -2.0 * control_response_batch(s, xm)
    return _jump_term(s, xm)


def control_response(s: Scenario, x) -> float:
    return float(control_response_batch(s, np.asarray(x, dtype=np.float64)[None, :])[0])


def treatment_response(s: Scenario, x) -> float:
    return float(treatment_response_batch(s, np.asarray(x, dtype=np.float64)[None, :])[0])


def true_cate(s: Scenario, x) -> float:
    return float(true_cate_batch(s, np.asarray(x, dtype=np.float64)[None, :])[0])


def random_correlation_matrix(m: int, rng: np.random.Generator) -> np.ndarray:
    """Random correlation matrix via the C-vine construction.

    Partial correlations are sampled uniformly on (-1, 1) and converted
    layer by layer with
        rho = rho * sqrt((1 - P[l,i]^2) (1 - P[l,k]^2)) + P[l,i] P[l,k],
    which always yields a symmetric positive-definite matrix with unit
    diagonal.
    """
    if m < 1:
        raise ParameterError(f"m must be positive, got {m}")
    partials = np.zeros((m, m))
    corr = np.eye(m)
    for k in range(m - 1):
        for i in range(k + 1, m):
            pc = rng.uniform(-1.0, 1.0)
            partials[k, i] = pc
            rho = pc
            for l in range(k - 1, -1, -1):
                rho = rho * math.sqrt(
                    (1.0 - partials[l, i] ** 2) * (1.0 - partials[l, k] ** 2)
                ) + partials[l, i] * partials[l, k]
            corr[k, i] = rho
            corr[i, k] = rho
    return corr


def sample_features(n: int, m: int, corr: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """n rows of zero-mean multivariate normal with the given correlation matrix."""
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    c = np.asarray(corr, dtype=np.float64)
    if c.shape != (m, m):
        raise DimensionError(f"correlation matrix must be ({m}, {m}), got {c.shape}")
    chol = None
    for jitter in _JITTERS:
        try:
            chol = np.linalg.cholesky(c + jitter * np.eye(m) if jitter else c)
            break
        except np.linalg.LinAlgError:
            continue
    if chol is None:
        raise NumericError("correlation matrix is not positive definite even after jitter")
    z = rng.standard_normal((n, m))
    return z @ chol.T


@dataclass(frozen=True)
class GenConfig:
    """Sizes and noise level for one generated repetition."""

    m: int
    n0: int
    n1: int
    noise_sigma: float = 1.0
    seed: int = 0
    n_test: int = 1000

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError(f"m must be positive, got {self.m}")
        if self.n0 < 1 or self.n1 < 1:
            raise ParameterError(f"group sizes must be positive, got n0={self.n0}, n1={self.n1}")
        if not (self.noise_sigma >= 0 and np.isfinite(self.noise_sigma)):
            raise ParameterError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma!r}")
        if self.n_test < 1:
            raise ParameterError(f"n_test must be positive, got {self.n_test}")


def generate_dataset(
    s: Scenario, cfg: GenConfig, rng: np.random.Generator | None = None
) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """One repetition: training Dataset plus (test features, true effects).

    The first n0 generated rows are controls, the next n1 are treated.
    Correlation draw, training features, outcome noise and test features each
    use their own child stream of rng, so e.g. changing n_test cannot perturb
    the training data.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    corr_rng, feat_rng, noise_rng, test_rng = rng.spawn(4)
    corr = random_correlation_matrix(cfg.m, corr_rng)
    n = cfg.n0 + cfg.n1
    xs = sample_features(n, cfg.m, corr, feat_rng)
    treatments = np.concatenate([np.zeros(cfg.n0, dtype=np.int64), np.ones(cfg.n1, dtype=np.int64)])
    responses = np.concatenate(
        [
            control_response_batch(s, xs[: cfg.n0]),
            treatment_response_batch(s, xs[cfg.n0 :]),
        ]
    )
    outcomes = responses + noise_rng.normal(0.0, cfg.noise_sigma, size=n)
    dataset = Dataset.from_arrays(xs, treatments, outcomes)
    test_xs = sample_features(cfg.n_test, cfg.m, corr, test_rng)
    test_tau = true_cate_batch(s, test_xs)
    return dataset, test_xs, test_tau


def dump_dataset_csv(d: Dataset, path) -> None:
    """Write a dataset as CSV with columns x1..xm, treatment, outcome."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j + 1}" for j in range(d.m)] + ["treatment", "outcome"])
        for s in d.samples:
            writer.writerow([repr(float(v)) for v in s.features] + [s.treatment, repr(s.outcome)])
