#!/usr/bin/env python3
"""Compare the learners on a smooth treatment-effect surface.

Runs the smooth scenario (sim3, m=10) at both group-size configurations
(95/5 and 475/25) with paired repetitions. On this surface the blended
imputation learner (x) is expected to beat the concatenation learner (co),
reversing the piecewise-effect ranking; see scripts/jump_benchmark.py.

Defaults take roughly 10 minutes on one core; use --reps 5 --trees 50 for
a quick look.
"""
import argparse
from pathlib import Path

from colearner.bench import ExperimentSpec, run_experiment, write_aggregates_csv, write_rows_csv
from colearner.forest import ForestConfig
from colearner.learners import CoConfig


def parse_args():
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--trees", type=int, default=200)
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--learners", default="t,s,x,co")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    return p.parse_args()


def main() -> int:
    args = parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    failed = 0
    all_rows, all_aggs = [], []
    print(f"{'n0':>5} {'n1':>4} {'learner':>8} {'reps':>5} {'mse':>10} {'stderr':>8}")
    for n0, n1 in ((95, 5), (475, 25)):
        spec = ExperimentSpec(
            scenario="sim3", m=10, n0=n0, n1=n1,
            learners=tuple(args.learners.split(",")),
            repetitions=args.reps, seed=args.seed, workers=args.workers,
            co=CoConfig(forest=ForestConfig(n_trees=args.trees, min_leaf=args.min_leaf)),
        )
        result = run_experiment(spec)
        failed += result.n_failed
        all_rows.extend(result.rows)
        all_aggs.extend(result.aggregates)
        for a in result.aggregates:
            print(f"{a.n0:>5} {a.n1:>4} {a.learner:>8} {a.reps_ok:>5} {a.mse:>10.3f} {a.stderr:>8.3f}")

    rows_path = args.out_dir / "smooth_effect_benchmark.csv"
    agg_path = args.out_dir / "smooth_effect_benchmark.agg.csv"
    write_rows_csv(all_rows, rows_path)
    write_aggregates_csv(all_aggs, agg_path)
    print(f"\nwrote {rows_path}, {agg_path}")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
