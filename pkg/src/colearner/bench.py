"""Benchmark harness: repeated simulation runs over scenarios and learners.

Within a repetition every learner sees the same dataset (paired comparison).
The per-repetition seed is derived from (master seed, sweep cell, repetition
index), never from the learner list, so adding a learner cannot perturb data
generation. For sweep axes that only change learner configuration (radius,
proportion, bag-n) the data seed ignores the sweep cell, so every cell of
the sweep sees identical datasets and only the swept parameter moves.

Failed learner fits are recorded with status "failed" and excluded from
aggregates; the run carries on.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .learners import LEARNER_KINDS, BagConfig, CoConfig, fit_learner
from .rngutil import derive_seed, rng_from
from .simgen import SCENARIO_KINDS, GenConfig, draw_scenario, generate_dataset

SWEEP_AXES = ("jumps", "m", "radius", "proportion", "bag-n")
_DATA_AXES = (None, "jumps", "m")  # axes whose value changes the generated data

_TAG_REP = 0xB001
_TAG_SCENARIO = 0xB002
_TAG_DATA = 0xB003
_TAG_LEARNER = 0xB004
_KIND_CODE = {kind: i + 1 for i, kind in enumerate(LEARNER_KINDS)}

ROW_COLUMNS = (
    "scenario", "learner", "m", "n0", "n1", "jumps", "radius_T", "proportion",
    "bag_N", "rep", "seed", "mse", "status",
)
AGG_COLUMNS = (
    "scenario", "learner", "m", "n0", "n1", "jumps", "radius_T", "proportion",
    "bag_N", "reps_ok", "mse", "stderr",
)


def mse(estimates, truths) -> float:
    """Mean squared error between two equal-length vectors."""
    a = np.asarray(estimates, dtype=np.float64)
    b = np.asarray(truths, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise ParameterError(f"expected equal-length vectors, got {a.shape} and {b.shape}")
    if a.size == 0:
        raise ParameterError("mse of empty vectors is undefined")
    return float(np.mean((a - b) ** 2))


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one bench run needs; sweep_axis=None means a single cell."""

    scenario: str
    m: int = 10
    n0: int = 95
    n1: int = 5
    jumps: int = 1
    learners: tuple[str, ...] = ("t", "x", "co")
    repetitions: int = 100
    seed: int = 0
    noise_sigma: float = 1.0
    n_test: int = 1000
    co: CoConfig = CoConfig()
    bag_n: int = 10
    bag_l: int | None = None
    bag_t: int | None = None
    sweep_axis: str | None = None
    sweep_values: tuple[float, ...] = ()
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "learners", tuple(self.learners))
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))
        if self.scenario not in SCENARIO_KINDS:
            raise ParameterError(f"scenario must be one of {SCENARIO_KINDS}, got {self.scenario!r}")
        if not self.learners:
            raise ParameterError("learner list must be non-empty")
        for kind in self.learners:
            if kind not in LEARNER_KINDS:
                raise ParameterError(f"unknown learner {kind!r}, choose from {LEARNER_KINDS}")
        if self.repetitions < 1:
            raise ParameterError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ParameterError(
                    f"sweep axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}"
                )
            if not self.sweep_values:
                raise ParameterError("sweep needs at least one value")


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    learner: str
    m: int
    n0: int
    n1: int
    jumps: int
    radius_T: float
    proportion: float
    bag_N: int
    rep: int
    seed: int
    mse: float
    status: str


@dataclass(frozen=True)
class AggregateRow:
    scenario: str
    learner: str
    m: int
    n0: int
    n1: int
    jumps: int
    radius_T: float
    proportion: float
    bag_N: int
    reps_ok: int
    mse: float
    stderr: float


@dataclass(frozen=True)
class RunResult:
    rows: tuple[ResultRow, ...]
    aggregates: tuple[AggregateRow, ...]
    n_failed: int


@dataclass(frozen=True)
class _Cell:
    """One sweep cell with the experiment parameters it resolves to."""

    m: int
    jumps: int
    co: CoConfig
    bag_n: int


def _as_int(value: float, axis: str) -> int:
    if value != int(value):
        raise ParameterError(f"axis {axis!r} needs integer values, got {value!r}")
    return int(value)


def _resolve_cell(spec: ExperimentSpec, value: float | None) -> _Cell:
    m, jumps, co, bag_n = spec.m, spec.jumps, spec.co, spec.bag_n
    if spec.sweep_axis is None or value is None:
        return _Cell(m=m, jumps=jumps, co=co, bag_n=bag_n)
    axis = spec.sweep_axis
    if axis == "jumps":
        jumps = _as_int(value, axis)
    elif axis == "m":
        m = _as_int(value, axis)
    elif axis == "radius":
        co = replace(co, radius=float(value))
    elif axis == "proportion":
        co = replace(co, proportion=float(value))
    elif axis == "bag-n":
        bag_n = _as_int(value, axis)
    return _Cell(m=m, jumps=jumps, co=co, bag_n=bag_n)


def default_bag_size(m: int) -> int:
    """Index-set size used when none is given: round(2m/3), at least 1."""
    return max(1, round(2 * m / 3))


def _run_rep(spec: ExperimentSpec, sweep_idx: int, rep_idx: int) -> list[ResultRow]:
    value = spec.sweep_values[sweep_idx] if spec.sweep_axis is not None else None
    cell = _resolve_cell(spec, value)
    data_idx = sweep_idx if spec.sweep_axis in _DATA_AXES else 0
    rep_seed = derive_seed(spec.seed, _TAG_REP, data_idx, rep_idx)

    scenario = draw_scenario(spec.scenario, cell.m, cell.jumps, rng_from(rep_seed, _TAG_SCENARIO))
    gen = GenConfig(
        m=cell.m, n0=spec.n0, n1=spec.n1,
        noise_sigma=spec.noise_sigma, seed=rep_seed, n_test=spec.n_test,
    )
    dataset, test_xs, test_tau = generate_dataset(scenario, gen, rng_from(rep_seed, _TAG_DATA))
    bag = BagConfig(
        l=spec.bag_l if spec.bag_l is not None else default_bag_size(cell.m),
        t=spec.bag_t if spec.bag_t is not None else default_bag_size(cell.m),
        n_draws=cell.bag_n,
    )

    rows = []
    for kind in spec.learners:
        learner_seed = derive_seed(rep_seed, _TAG_LEARNER, _KIND_CODE[kind])
        try:
            learner = fit_learner(kind, dataset, cell.co, bag, learner_seed)
            err = mse(learner.predict_cate_many(test_xs), test_tau)
            status = "ok"
        except Exception:
            err = math.nan
            status = "failed"
        rows.append(
            ResultRow(
                scenario=spec.scenario, learner=kind, m=cell.m, n0=spec.n0, n1=spec.n1,
                jumps=cell.jumps, radius_T=cell.co.radius, proportion=cell.co.proportion,
                bag_N=cell.bag_n, rep=rep_idx, seed=rep_seed, mse=err, status=status,
            )
        )
    return rows


def _run_rep_job(args) -> list[ResultRow]:
    return _run_rep(*args)


def _aggregate(spec: ExperimentSpec, rows: Sequence[ResultRow]) -> tuple[AggregateRow, ...]:
    n_values = len(spec.sweep_values) if spec.sweep_axis is not None else 1
    per_cell = len(spec.learners) * spec.repetitions
    aggs = []
    for ci in range(n_values):
        cell_rows = rows[ci * per_cell : (ci + 1) * per_cell]
        for kind in spec.learners:
            ok = [r for r in cell_rows if r.learner == kind and r.status == "ok"]
            any_row = next(r for r in cell_rows if r.learner == kind)
            if ok:
                values = np.array([r.mse for r in ok])
                mean = float(values.mean())
                stderr = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
            else:
                mean = math.nan
                stderr = math.nan
            aggs.append(
                AggregateRow(
                    scenario=any_row.scenario, learner=kind, m=any_row.m, n0=any_row.n0,
                    n1=any_row.n1, jumps=any_row.jumps, radius_T=any_row.radius_T,
                    proportion=any_row.proportion, bag_N=any_row.bag_N,
                    reps_ok=len(ok), mse=mean, stderr=stderr,
                )
            )
    return tuple(aggs)


def run_experiment(spec: ExperimentSpec) -> RunResult:
    """Run all (sweep cell, repetition) tasks and aggregate per cell and learner.

    Row order is fixed: sweep cells in given order, repetitions ascending,
    learners in spec order. Results are identical for any worker count.
    """
    n_values = len(spec.sweep_values) if spec.sweep_axis is not None else 1
    tasks = [(spec, ci, ri) for ci in range(n_values) for ri in range(spec.repetitions)]
    if spec.workers == 1:
        per_task = [_run_rep_job(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            per_task = list(pool.map(_run_rep_job, tasks))
    rows = tuple(row for chunk in per_task for row in chunk)
    aggregates = _aggregate(spec, rows)
    n_failed = sum(1 for r in rows if r.status != "ok")
    return RunResult(rows=rows, aggregates=aggregates, n_failed=n_failed)


def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows_csv(rows: Sequence[ResultRow], path) -> None:
    """Per-repetition results; one header, LF endings, full-precision floats."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROW_COLUMNS)
        for r in rows:
            writer.writerow([_format_value(getattr(r, c)) for c in ROW_COLUMNS])


def write_aggregates_csv(aggs: Sequence[AggregateRow], path) -> None:
    """Per-cell aggregates; the mse column holds the mean over ok repetitions."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGG_COLUMNS)
        for a in aggs:
            writer.writerow([_format_value(getattr(a, c)) for c in AGG_COLUMNS])
