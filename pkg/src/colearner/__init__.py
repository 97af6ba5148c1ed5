"""CATE meta-learners on a weighted random forest, with a simulation bench.

Quick tour: generate a dataset with simgen, fit any learner from learners,
or drive full repeated experiments through bench/cli.
"""

from .bench import ExperimentSpec, ResultRow, RunResult, mse, run_experiment
from .data import ConcatExample, ConcatSet, Dataset, Sample, normalize_weights, split_groups
from .distance import Metric, dist, k_nearest, neighbors_within, sample_in_ball, weight_from_distance
from .forest import Forest, ForestConfig, fit_forest
from .learners import (
    BagConfig,
    BaggedCoLearner,
    CoConfig,
    CoLearner,
    SLearner,
    TLearner,
    XLearner,
    build_concat_set,
    fit_co_bagged,
    fit_co_learner,
    fit_learner,
    fit_s_learner,
    fit_t_learner,
    fit_x_learner,
)
from .simgen import (
    GenConfig,
    Scenario,
    control_response,
    draw_scenario,
    generate_dataset,
    random_correlation_matrix,
    sample_features,
    treatment_response,
    true_cate,
)

__version__ = "0.1.0"

__all__ = [
    "BagConfig", "BaggedCoLearner", "CoConfig", "CoLearner", "ConcatExample", "ConcatSet",
    "Dataset", "ExperimentSpec", "Forest", "ForestConfig", "GenConfig", "Metric", "ResultRow",
    "RunResult", "SLearner", "Sample", "Scenario", "TLearner", "XLearner", "build_concat_set",
    "control_response", "dist", "draw_scenario", "fit_co_bagged", "fit_co_learner", "fit_forest",
    "fit_learner", "fit_s_learner", "fit_t_learner", "fit_x_learner", "generate_dataset",
    "k_nearest", "mse", "neighbors_within", "normalize_weights", "random_correlation_matrix",
    "run_experiment", "sample_features", "sample_in_ball", "split_groups", "treatment_response",
    "true_cate", "weight_from_distance",
]
