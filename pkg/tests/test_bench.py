"""Tests for the experiment bench: spec validation, run orchestration,
pairing of repetition seeds across sweep cells, aggregation, CSV output."""
import csv
import math

import numpy as np
import pytest

import colearner.bench as bench
from colearner.bench import (
    AGG_COLUMNS,
    ROW_COLUMNS,
    SWEEP_AXES,
    AggregateRow,
    ExperimentSpec,
    ResultRow,
    default_bag_size,
    mse,
    run_experiment,
    write_aggregates_csv,
    write_rows_csv,
)
from colearner.errors import ParameterError
from colearner.forest import ForestConfig
from colearner.learners import CoConfig

TINY_CO = CoConfig(radius=1.5, forest=ForestConfig(n_trees=3, min_leaf=2))


def tiny_spec(**overrides) -> ExperimentSpec:
    base = dict(
        scenario="sim1", m=3, n0=12, n1=4, jumps=1, learners=("t",),
        repetitions=2, seed=0, n_test=8, co=TINY_CO,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


class TestMse:
    def test_hand_computed_values(self):
        assert mse([1.0, 2.0, 3.0], [2.0, 3.0, 5.0]) == 2.0
        assert mse([4.0, -1.0], [4.0, -1.0]) == 0.0
        assert mse([0.0], [2.0]) == 4.0

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ParameterError):
            mse([1.0, 2.0], [1.0])

    def test_rejects_empty_vectors(self):
        with pytest.raises(ParameterError):
            mse([], [])


class TestDefaultBagSize:
    @pytest.mark.parametrize("m,expected", [(1, 1), (2, 1), (3, 2), (10, 7), (30, 20)])
    def test_two_thirds_rounded_with_floor_one(self, m, expected):
        assert default_bag_size(m) == expected


class TestExperimentSpecValidation:
    def test_defaults(self):
        spec = ExperimentSpec(scenario="sim2")
        assert spec.m == 10 and (spec.n0, spec.n1) == (95, 5)
        assert spec.learners == ("t", "x", "co")
        assert spec.sweep_axis is None and spec.sweep_values == ()

    def test_learners_and_sweep_values_are_coerced_to_tuples(self):
        spec = tiny_spec(learners=["t", "co"], sweep_axis="radius", sweep_values=[1, 2])
        assert spec.learners == ("t", "co")
        assert spec.sweep_values == (1.0, 2.0)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"scenario": "sim9"},
            {"learners": ()},
            {"learners": ("t", "zzz")},
            {"repetitions": 0},
            {"workers": 0},
            {"sweep_axis": "noise"},
            {"sweep_axis": "jumps", "sweep_values": ()},
        ],
    )
    def test_rejects_bad_specs(self, overrides):
        with pytest.raises(ParameterError):
            tiny_spec(**overrides)

    def test_axis_names(self):
        assert SWEEP_AXES == ("jumps", "m", "radius", "proportion", "bag-n")

    def test_integer_axis_rejects_fractional_values_at_run_time(self):
        spec = tiny_spec(sweep_axis="jumps", sweep_values=(1.5,))
        with pytest.raises(ParameterError):
            run_experiment(spec)


class TestRunExperiment:
    def test_single_cell_counts_and_statuses(self):
        spec = tiny_spec(learners=("t", "s", "x", "co", "cob"), repetitions=2)
        res = run_experiment(spec)
        assert len(res.rows) == 5 * 2
        assert len(res.aggregates) == 5
        assert res.n_failed == 0
        assert all(r.status == "ok" and math.isfinite(r.mse) for r in res.rows)
        assert {r.learner for r in res.rows} == {"t", "s", "x", "co", "cob"}
        assert sorted({r.rep for r in res.rows}) == [0, 1]

    def test_aggregates_match_a_direct_recomputation(self):
        spec = tiny_spec(learners=("t", "co"), repetitions=3)
        res = run_experiment(spec)
        for agg in res.aggregates:
            vals = [r.mse for r in res.rows if r.learner == agg.learner]
            assert agg.reps_ok == 3
            np.testing.assert_allclose(agg.mse, np.mean(vals), rtol=1e-12)
            expected_se = np.std(vals, ddof=1) / math.sqrt(len(vals))
            np.testing.assert_allclose(agg.stderr, expected_se, rtol=1e-12)

    def test_sweep_produces_one_cell_per_value(self):
        spec = tiny_spec(sweep_axis="radius", sweep_values=(0.5, 1.5, 3.0))
        res = run_experiment(spec)
        assert len(res.rows) == 3 * 2
        assert len(res.aggregates) == 3
        assert [a.radius_T for a in res.aggregates] == [0.5, 1.5, 3.0]
        # non-swept knobs keep their spec values in every row
        assert all(r.proportion == 1.0 and r.jumps == 1 for r in res.rows)

    def test_rerun_is_identical(self):
        spec = tiny_spec(learners=("t", "co"), repetitions=2)
        a = run_experiment(spec)
        b = run_experiment(spec)
        assert a.rows == b.rows
        assert a.aggregates == b.aggregates

    def test_worker_count_does_not_change_results(self):
        base = tiny_spec(learners=("t", "co"), repetitions=2)
        serial = run_experiment(base)
        parallel = run_experiment(tiny_spec(learners=("t", "co"), repetitions=2, workers=2))
        assert serial.rows == parallel.rows
        assert serial.aggregates == parallel.aggregates


class TestRepetitionPairing:
    def test_parameter_sweeps_reuse_the_same_datasets(self):
        # sweeping a learner knob must not redraw data: repetition k sees
        # the same seed in every cell, giving paired comparisons
        spec = tiny_spec(sweep_axis="proportion", sweep_values=(0.5, 2.0))
        res = run_experiment(spec)
        by_cell = {}
        for r in res.rows:
            by_cell.setdefault(r.proportion, {})[r.rep] = r.seed
        assert by_cell[0.5] == by_cell[2.0]

    def test_data_sweeps_draw_fresh_datasets_per_cell(self):
        spec = tiny_spec(sweep_axis="jumps", sweep_values=(1, 2))
        res = run_experiment(spec)
        by_cell = {}
        for r in res.rows:
            by_cell.setdefault(r.jumps, {})[r.rep] = r.seed
        assert set(by_cell[1].values()).isdisjoint(by_cell[2].values())

    def test_learners_in_one_cell_share_the_dataset(self):
        spec = tiny_spec(learners=("t", "x", "co"), repetitions=2)
        res = run_experiment(spec)
        for rep in (0, 1):
            seeds = {r.seed for r in res.rows if r.rep == rep}
            assert len(seeds) == 1


class TestFailureHandling:
    def test_always_failing_learner_is_reported_not_raised(self, monkeypatch):
        real = bench.fit_learner

        def flaky(kind, *args, **kwargs):
            if kind == "co":
                raise RuntimeError("boom")
            return real(kind, *args, **kwargs)

        monkeypatch.setattr(bench, "fit_learner", flaky)
        res = run_experiment(tiny_spec(learners=("t", "co"), repetitions=2))
        assert res.n_failed == 2
        co_rows = [r for r in res.rows if r.learner == "co"]
        assert all(r.status == "failed" and math.isnan(r.mse) for r in co_rows)
        t_rows = [r for r in res.rows if r.learner == "t"]
        assert all(r.status == "ok" for r in t_rows)
        co_agg = next(a for a in res.aggregates if a.learner == "co")
        assert co_agg.reps_ok == 0
        assert math.isnan(co_agg.mse)

    def test_partial_failure_is_excluded_from_the_aggregate(self, monkeypatch):
        real = bench.fit_learner
        calls = {"n": 0}

        def first_call_fails(kind, *args, **kwargs):
            calls["n"] += 1
            if calls["n"] == 1:
                raise RuntimeError("boom")
            return real(kind, *args, **kwargs)

        monkeypatch.setattr(bench, "fit_learner", first_call_fails)
        res = run_experiment(tiny_spec(learners=("co",), repetitions=2))
        assert res.n_failed == 1
        agg = res.aggregates[0]
        ok_rows = [r for r in res.rows if r.status == "ok"]
        assert agg.reps_ok == 1
        assert agg.mse == ok_rows[0].mse
        assert agg.stderr == 0.0


class TestCsvWriters:
    ROW = ResultRow(
        scenario="sim1", learner="co", m=2, n0=10, n1=3, jumps=1,
        radius_T=1.5, proportion=1.0, bag_N=10, rep=0, seed=7, mse=0.25, status="ok",
    )

    def test_rows_csv_bytes(self, tmp_path):
        path = tmp_path / "rows.csv"
        write_rows_csv([self.ROW], path)
        expected = (
            "scenario,learner,m,n0,n1,jumps,radius_T,proportion,bag_N,rep,seed,mse,status\n"
            "sim1,co,2,10,3,1,1.5,1.0,10,0,7,0.25,ok\n"
        )
        assert path.read_bytes() == expected.encode()

    def test_failed_row_serializes_nan(self, tmp_path):
        path = tmp_path / "rows.csv"
        row = ResultRow(
            scenario="sim1", learner="co", m=2, n0=10, n1=3, jumps=1,
            radius_T=1.5, proportion=1.0, bag_N=10, rep=0, seed=7,
            mse=float("nan"), status="failed",
        )
        write_rows_csv([row], path)
        assert path.read_text().splitlines()[1].endswith(",nan,failed")

    def test_aggregates_csv_bytes(self, tmp_path):
        path = tmp_path / "agg.csv"
        agg = AggregateRow(
            scenario="sim2", learner="x", m=10, n0=95, n1=5, jumps=1,
            radius_T=1.5, proportion=1.0, bag_N=10, reps_ok=30, mse=1.662, stderr=0.05,
        )
        write_aggregates_csv([agg], path)
        expected = (
            "scenario,learner,m,n0,n1,jumps,radius_T,proportion,bag_N,reps_ok,mse,stderr\n"
            "sim2,x,10,95,5,1,1.5,1.0,10,30,1.662,0.05\n"
        )
        assert path.read_bytes() == expected.encode()

    def test_float_columns_roundtrip_through_repr(self, tmp_path):
        spec = tiny_spec(repetitions=1)
        res = run_experiment(spec)
        path = tmp_path / "rows.csv"
        write_rows_csv(res.rows, path)
        with open(path, newline="") as fh:
            parsed = list(csv.DictReader(fh))
        assert list(parsed[0]) == list(ROW_COLUMNS)
        assert float(parsed[0]["mse"]) == res.rows[0].mse
        assert int(parsed[0]["seed"]) == res.rows[0].seed

    def test_column_layouts(self):
        assert ROW_COLUMNS[:6] == AGG_COLUMNS[:6]
        assert ROW_COLUMNS[-2:] == ("mse", "status")
        assert AGG_COLUMNS[-3:] == ("reps_ok", "mse", "stderr")
