#!/usr/bin/env python3
"""Benchmark the meta-learners across effect-discontinuity levels.

Runs the piecewise-effect scenario (sim2, m=10, groups 95/5) over 1..5
jumps with paired repetitions, then writes per-repetition and aggregate
CSVs plus an SVG of mean MSE per learner against the number of jumps.

Defaults (30 repetitions, 200 trees) take roughly 15 minutes on one core;
use --reps 5 --trees 50 for a quick look.
"""
import argparse
from pathlib import Path

from colearner.bench import ExperimentSpec, run_experiment, write_aggregates_csv, write_rows_csv
from colearner.charts import render_line_chart
from colearner.forest import ForestConfig
from colearner.learners import CoConfig


def parse_args():
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--trees", type=int, default=200)
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--learners", default="t,s,x,co",
                   help="comma list from t,s,x,co,cob (cob multiplies runtime ~10x)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    return p.parse_args()


def main() -> int:
    args = parse_args()
    spec = ExperimentSpec(
        scenario="sim2", m=10, n0=95, n1=5,
        learners=tuple(args.learners.split(",")),
        repetitions=args.reps, seed=args.seed, workers=args.workers,
        co=CoConfig(forest=ForestConfig(n_trees=args.trees, min_leaf=args.min_leaf)),
        sweep_axis="jumps", sweep_values=(1, 2, 3, 4, 5),
    )
    result = run_experiment(spec)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    rows_path = args.out_dir / "jump_benchmark.csv"
    agg_path = args.out_dir / "jump_benchmark.agg.csv"
    write_rows_csv(result.rows, rows_path)
    write_aggregates_csv(result.aggregates, agg_path)

    print(f"{'learner':>8} {'jumps':>6} {'reps':>5} {'mse':>10} {'stderr':>8}")
    for a in result.aggregates:
        print(f"{a.learner:>8} {a.jumps:>6} {a.reps_ok:>5} {a.mse:>10.3f} {a.stderr:>8.3f}")

    series = {}
    for a in result.aggregates:
        series.setdefault(a.learner, []).append((float(a.jumps), a.mse))
    svg_path = args.out_dir / "jump_benchmark.svg"
    svg_path.write_text(render_line_chart(
        list(series.items()), x_label="jumps", y_label="mse",
        title="mean MSE by number of jumps (sim2, m=10, 95/5)",
    ))
    print(f"\nwrote {rows_path}, {agg_path}, {svg_path}")
    return 1 if result.n_failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
