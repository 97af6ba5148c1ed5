"""Meta-learners for conditional average treatment effect (CATE) estimation.

All learners share the same weighted-forest base regressor and expose
predict_cate / predict_cate_many over the original feature space:

* t: separate outcome forests per group, effect = g1(x) - g0(x).
* s: one forest on features plus a trailing treatment flag, effect =
  g(x, 1) - g(x, 0).
* x: imputed per-group effects regressed per group, blended with a constant
  alpha (default: treated fraction n1 / (n0 + n1)).
* co: a single forest on concatenated (treatment, control) feature pairs.
  Its training set joins, for each treated unit i: the unit paired with
  itself against the control-outcome model g0; every control within the
  matching rule of i (inverse-distance weighted); and K synthetic controls
  per treated unit, drawn uniformly from the metric ball of the matching
  radius around i and targeted against g0. Effects are read off at the
  self-pair point f(x || x).
* cob: feature-bagged co; each draw restricts the control side to a random
  index set K0 (size l) and the treatment side to K1 (size t), and the
  final effect is the mean over draws of f(x[K1] || x[K0]).

Seeds: every stochastic stage derives its own stream from (seed, stage tag),
so e.g. enlarging the synthetic sample cannot perturb the forest bootstrap.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import (
    ConcatExample,
    ConcatSet,
    Dataset,
    group_arrays,
    normalized_weight_array,
    split_groups,
)
from .distance import (
    DEFAULT_WEIGHT_FLOOR,
    EUCLIDEAN,
    Metric,
    distances_to,
    k_nearest,
    sample_in_ball,
    weight_from_distance,
)
from .errors import DimensionError, ParameterError
from .forest import Forest, ForestConfig, fit_forest
from .rngutil import derive_seed, rng_from

LEARNER_KINDS = ("t", "s", "x", "co", "cob")

_TAG_T_G0 = 0x7101
_TAG_T_G1 = 0x7102
_TAG_S_F = 0x7201
_TAG_X_G0 = 0x7301
_TAG_X_G1 = 0x7302
_TAG_X_TAU0 = 0x7303
_TAG_X_TAU1 = 0x7304
_TAG_CO_G0 = 0x7401
_TAG_CO_BALL = 0x7402
_TAG_CO_F = 0x7403
_TAG_BAG_SUBSPACE = 0x7501

NEIGHBOR_RULES = ("radius", "knn")


@dataclass(frozen=True)
class CoConfig:
    """Configuration for the concatenated-pair learner.

    radius is both the matching threshold (under the radius rule) and the
    synthetic ball radius; proportion rho sets the synthetic count
    K = round(rho * matched / n1) (K = round(rho * n1) when nothing matches).
    """

    radius: float = 1.5
    proportion: float = 1.0
    metric: Metric = EUCLIDEAN
    forest: ForestConfig = ForestConfig()
    weight_floor: float = DEFAULT_WEIGHT_FLOOR
    neighbor_rule: str = "radius"
    knn_k: int = 5

    def __post_init__(self):
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise ParameterError(f"radius must be positive and finite, got {self.radius!r}")
        if not (self.proportion >= 0 and np.isfinite(self.proportion)):
            raise ParameterError(f"proportion must be >= 0 and finite, got {self.proportion!r}")
        if not (self.weight_floor > 0 and np.isfinite(self.weight_floor)):
            raise ParameterError(f"weight_floor must be positive, got {self.weight_floor!r}")
        if self.neighbor_rule not in NEIGHBOR_RULES:
            raise ParameterError(
                f"neighbor_rule must be one of {NEIGHBOR_RULES}, got {self.neighbor_rule!r}"
            )
        if self.knn_k < 1:
            raise ParameterError(f"knn_k must be >= 1, got {self.knn_k}")


@dataclass(frozen=True)
class BagConfig:
    """Feature bagging: n_draws random index-set pairs (K0 of size l, K1 of size t)."""

    l: int
    t: int
    n_draws: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.l < 1 or self.t < 1:
            raise ParameterError(f"index set sizes must be >= 1, got l={self.l}, t={self.t}")
        if self.n_draws < 1:
            raise ParameterError(f"n_draws must be >= 1, got {self.n_draws}")


def _query_matrix(xs, m: int) -> np.ndarray:
    xm = np.asarray(xs, dtype=np.float64)
    if xm.ndim != 2 or xm.shape[1] != m:
        raise DimensionError(f"expected query shape (n, {m}), got {xm.shape}")
    return xm


class CateLearner:
    """Shared prediction surface; subclasses implement _predict_batch."""

    kind = "?"
    m: int

    def _predict_batch(self, xm: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_cate(self, x) -> float:
        xv = np.asarray(x, dtype=np.float64)
        if xv.ndim != 1 or xv.size != self.m:
            raise DimensionError(f"expected a vector of length {self.m}, got shape {xv.shape}")
        return float(self._predict_batch(xv[None, :])[0])

    def predict_cate_many(self, xs) -> np.ndarray:
        return self._predict_batch(_query_matrix(xs, self.m))


@dataclass(frozen=True)
class TLearner(CateLearner):
    g0: Forest
    g1: Forest
    m: int
    kind = "t"

    def _predict_batch(self, xm):
        return self.g1.predict_many(xm) - self.g0.predict_many(xm)


@dataclass(frozen=True)
class SLearner(CateLearner):
    forest: Forest  # fit on m+1 inputs, treatment flag appended last
    m: int
    kind = "s"

    def _predict_batch(self, xm):
        flag = np.ones((len(xm), 1))
        return self.forest.predict_many(np.hstack([xm, flag])) - self.forest.predict_many(
            np.hstack([xm, 0.0 * flag])
        )


@dataclass(frozen=True)
class XLearner(CateLearner):
    tau0: Forest  # fit on control rows, imputed targets g1(X) - y
    tau1: Forest  # fit on treated rows, imputed targets y - g0(X)
    alpha: float
    m: int
    kind = "x"

    def _predict_batch(self, xm):
        return self.alpha * self.tau0.predict_many(xm) + (1.0 - self.alpha) * self.tau1.predict_many(xm)


@dataclass(frozen=True)
class CoLearner(CateLearner):
    f: Forest  # fit on concatenated (treatment, control) pairs
    m: int
    kind = "co"

    def _predict_batch(self, xm):
        return self.f.predict_many(np.hstack([xm, xm]))


@dataclass(frozen=True)
class BagDraw:
    k0: np.ndarray  # sorted control-side feature indices, size l
    k1: np.ndarray  # sorted treatment-side feature indices, size t
    f: Forest


@dataclass(frozen=True)
class BaggedCoLearner(CateLearner):
    draws: tuple[BagDraw, ...]
    m: int
    kind = "cob"

    def _predict_batch(self, xm):
        acc = np.zeros(len(xm))
        for draw in self.draws:
            acc += draw.f.predict_many(np.hstack([xm[:, draw.k1], xm[:, draw.k0]]))
        return acc / len(self.draws)

    def predict_per_draw(self, x) -> np.ndarray:
        """One effect estimate per draw (their mean is predict_cate)."""
        xv = np.asarray(x, dtype=np.float64)[None, :]
        return np.array(
            [d.f.predict(np.concatenate([xv[0, d.k1], xv[0, d.k0]])) for d in self.draws]
        )


def fit_t_learner(d: Dataset, config: ForestConfig = ForestConfig(), seed: int = 0) -> TLearner:
    controls, treated = split_groups(d)
    xc, yc = group_arrays(controls)
    xt, yt = group_arrays(treated)
    g0 = fit_forest(xc, yc, None, config, derive_seed(seed, _TAG_T_G0))
    g1 = fit_forest(xt, yt, None, config, derive_seed(seed, _TAG_T_G1))
    return TLearner(g0=g0, g1=g1, m=d.m)


def fit_s_learner(d: Dataset, config: ForestConfig = ForestConfig(), seed: int = 0) -> SLearner:
    split_groups(d)  # both groups must be present
    xs = np.hstack([d.features_matrix(), d.treatments()[:, None].astype(np.float64)])
    f = fit_forest(xs, d.outcomes(), None, config, derive_seed(seed, _TAG_S_F))
    return SLearner(forest=f, m=d.m)


def fit_x_learner(
    d: Dataset,
    config: ForestConfig = ForestConfig(),
    alpha: float | None = None,
    seed: int = 0,
) -> XLearner:
    controls, treated = split_groups(d)
    xc, yc = group_arrays(controls)
    xt, yt = group_arrays(treated)
    if alpha is None:
        alpha = len(treated) / (len(controls) + len(treated))
    if not (0.0 <= alpha <= 1.0):
        raise ParameterError(f"alpha must be in [0, 1], got {alpha!r}")
    g0 = fit_forest(xc, yc, None, config, derive_seed(seed, _TAG_X_G0))
    g1 = fit_forest(xt, yt, None, config, derive_seed(seed, _TAG_X_G1))
    d1 = yt - g0.predict_many(xt)
    d0 = g1.predict_many(xc) - yc
    tau1 = fit_forest(xt, d1, None, config, derive_seed(seed, _TAG_X_TAU1))
    tau0 = fit_forest(xc, d0, None, config, derive_seed(seed, _TAG_X_TAU0))
    return XLearner(tau0=tau0, tau1=tau1, alpha=float(alpha), m=d.m)


def _concat_training_arrays(
    ctrl_hx: np.ndarray,
    ctrl_y: np.ndarray,
    treat_hx: np.ndarray,
    treat_zx: np.ndarray,
    treat_y: np.ndarray,
    co: CoConfig,
    seed: int,
):
    """Assemble the concatenated training block in (possibly restricted) spaces.

    ctrl_hx holds control features in the control-side space, treat_hx the
    treated features projected to that same space (used for g0, matching and
    the synthetic ball), and treat_zx the treated features in the
    treatment-side space (used for the first half of each concatenated
    vector). In the unrestricted pipeline treat_hx is treat_zx is the full
    treated feature matrix.

    Returns (z matrix, targets, normalized weights, g0 forest,
    matched pair count, synthetic draws per treated unit).
    """
    n1 = len(treat_y)
    g0 = fit_forest(ctrl_hx, ctrl_y, None, co.forest, derive_seed(seed, _TAG_CO_G0))

    z_rows: list[np.ndarray] = []
    targets: list[float] = []
    weights: list[float] = []

    # Self pairs: each treated unit against the control-outcome model.
    g0_at_treated = g0.predict_many(treat_hx)
    for i in range(n1):
        z_rows.append(np.concatenate([treat_zx[i], treat_hx[i]]))
        targets.append(float(treat_y[i] - g0_at_treated[i]))
        weights.append(1.0)

    # Matched pairs: controls near each treated unit, inverse-distance weighted.
    matched_total = 0
    for i in range(n1):
        dists = distances_to(treat_hx[i], ctrl_hx, co.metric)
        if co.neighbor_rule == "radius":
            js = np.nonzero(dists <= co.radius)[0]
        else:
            js = k_nearest(treat_hx[i], ctrl_hx, co.knn_k, co.metric)
        for j in js:
            z_rows.append(np.concatenate([treat_zx[i], ctrl_hx[j]]))
            targets.append(float(treat_y[i] - ctrl_y[j]))
            weights.append(weight_from_distance(float(dists[j]), co.weight_floor))
        matched_total += len(js)

    # Synthetic controls: K ball perturbations per treated unit, scored by g0.
    if matched_total > 0:
        n_synth = int(round(co.proportion * matched_total / n1))
    else:
        n_synth = int(round(co.proportion * n1))
    if n_synth > 0:
        ball_rng = rng_from(seed, _TAG_CO_BALL)
        l_dim = ctrl_hx.shape[1]
        offsets = np.stack(
            [
                sample_in_ball(l_dim, co.radius, co.metric, ball_rng)
                for _ in range(n1 * n_synth)
            ]
        )
        ball_dists = distances_to(np.zeros(l_dim), offsets, co.metric)
        perturbed = np.repeat(treat_hx, n_synth, axis=0) + offsets
        g0_at_perturbed = g0.predict_many(perturbed)
        row = 0
        for i in range(n1):
            for _ in range(n_synth):
                z_rows.append(np.concatenate([treat_zx[i], perturbed[row]]))
                targets.append(float(treat_y[i] - g0_at_perturbed[row]))
                weights.append(weight_from_distance(float(ball_dists[row]), co.weight_floor))
                row += 1

    z = np.stack(z_rows)
    y = np.array(targets, dtype=np.float64)
    w = normalized_weight_array(np.array(weights, dtype=np.float64))
    return z, y, w, g0, matched_total, n_synth


def build_concat_set(
    d: Dataset, co: CoConfig = CoConfig(), seed: int = 0
) -> tuple[ConcatSet, Forest]:
    """Build the concatenated training set and the control-outcome model.

    Examples appear in a fixed order: the n1 self pairs, then matched pairs
    grouped by treated unit (controls in ascending index order), then
    synthetic draws grouped by treated unit. The set size is always
    matched_total + (1 + K) * n1 and weights are normalized to mean 1.
    """
    controls, treated = split_groups(d)
    xc, yc = group_arrays(controls)
    xt, yt = group_arrays(treated)
    z, y, w, g0, _, _ = _concat_training_arrays(xc, yc, xt, xt, yt, co, seed)
    examples = tuple(
        ConcatExample(z=z[i], target=float(y[i]), weight=float(w[i])) for i in range(len(y))
    )
    return ConcatSet(examples=examples, m=d.m), g0


def fit_co_learner(d: Dataset, co: CoConfig = CoConfig(), seed: int = 0) -> CoLearner:
    cset, _ = build_concat_set(d, co, seed)
    f = fit_forest(
        cset.z_matrix(), cset.targets(), cset.weights(), co.forest, derive_seed(seed, _TAG_CO_F)
    )
    return CoLearner(f=f, m=d.m)


def fit_co_bagged(d: Dataset, co: CoConfig, bag: BagConfig) -> BaggedCoLearner:
    """Feature-bagged variant: bag.n_draws restricted pipelines, averaged.

    Draw i uses pipeline seed bag.seed + i, so a single draw with l = t = m
    reproduces fit_co_learner(d, co, bag.seed) exactly; the index sets come
    from a separate derived stream so drawing them cannot shift the pipeline
    streams.
    """
    m = d.m
    if bag.l > m or bag.t > m:
        raise ParameterError(f"index set sizes must be <= m={m}, got l={bag.l}, t={bag.t}")
    controls, treated = split_groups(d)
    xc, yc = group_arrays(controls)
    xt, yt = group_arrays(treated)
    draws = []
    for i in range(bag.n_draws):
        sub_rng = rng_from(bag.seed, _TAG_BAG_SUBSPACE, i)
        k0 = np.sort(sub_rng.choice(m, size=bag.l, replace=False))
        k1 = np.sort(sub_rng.choice(m, size=bag.t, replace=False))
        sub_seed = bag.seed + i
        z, y, w, _, _, _ = _concat_training_arrays(
            xc[:, k0], yc, xt[:, k0], xt[:, k1], yt, co, sub_seed
        )
        f = fit_forest(z, y, w, co.forest, derive_seed(sub_seed, _TAG_CO_F))
        draws.append(BagDraw(k0=k0, k1=k1, f=f))
    return BaggedCoLearner(draws=tuple(draws), m=m)


def fit_learner(
    kind: str,
    d: Dataset,
    co: CoConfig = CoConfig(),
    bag: BagConfig | None = None,
    seed: int = 0,
) -> CateLearner:
    """Fit by kind. t/s/x use co.forest as their base-forest configuration."""
    if kind == "t":
        return fit_t_learner(d, co.forest, seed)
    if kind == "s":
        return fit_s_learner(d, co.forest, seed)
    if kind == "x":
        return fit_x_learner(d, co.forest, seed=seed)
    if kind == "co":
        return fit_co_learner(d, co, seed)
    if kind == "cob":
        if bag is None:
            raise ParameterError("kind 'cob' needs a BagConfig")
        return fit_co_bagged(d, co, replace(bag, seed=seed))
    raise ParameterError(f"kind must be one of {LEARNER_KINDS}, got {kind!r}")
