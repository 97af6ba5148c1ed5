"""Command line interface.

Subcommands:
  run    one benchmark cell; writes per-repetition CSV plus an aggregate CSV
  sweep  the same over a list of values on one axis
  plot   aggregate (or per-repetition) CSV to an SVG line chart

Options may also come from a flat JSON config file (--config); explicit
flags override config values, and the merged spec is echoed to stderr.
Exit codes: 0 success, 1 usage/config/data error, 2 run finished but some
repetitions failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .bench import (
    SWEEP_AXES,
    AggregateRow,
    ExperimentSpec,
    run_experiment,
    write_aggregates_csv,
    write_rows_csv,
)
from .charts import render_line_chart
from .errors import DataError, NumericError, ParameterError
from .forest import ForestConfig
from .learners import CoConfig
from .simgen import SCENARIO_KINDS

_DEFAULTS: dict = {
    "scenario": None,
    "m": 10,
    "n0": 95,
    "n1": 5,
    "jumps": 1,
    "reps": 100,
    "learners": "t,x,co",
    "seed": 0,
    "radius": 1.5,
    "proportion": 1.0,
    "bag_n": 10,
    "noise": 1.0,
    "n_test": 1000,
    "trees": 1000,
    "threads": 1,
    "out": None,
    "axis": None,
    "values": None,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; this CLI reserves 2 for
    partial run failures, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fail(message: str) -> SystemExit:
    print(f"error: {message}", file=sys.stderr)
    return SystemExit(1)


def _add_bench_flags(p: argparse.ArgumentParser, sweep: bool) -> None:
    p.add_argument("--scenario", choices=SCENARIO_KINDS)
    p.add_argument("--m", type=int)
    p.add_argument("--n0", type=int)
    p.add_argument("--n1", type=int)
    p.add_argument("--jumps", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--learners", help="comma list from t,s,x,co,cob")
    p.add_argument("--seed", type=int)
    p.add_argument("--radius", type=float, help="matching/ball radius of the co learner")
    p.add_argument("--proportion", type=float, help="synthetic-to-matched proportion rho")
    p.add_argument("--bag-n", dest="bag_n", type=int, help="draws for the cob learner")
    p.add_argument("--noise", type=float, help="outcome noise sigma")
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--trees", type=int, help="trees per forest")
    p.add_argument("--threads", type=int, help="parallel workers over repetitions")
    p.add_argument("--out", help="per-repetition CSV path; aggregates go to <out stem>.agg.csv")
    p.add_argument("--config", help="flat JSON config; flags override its values")
    if sweep:
        p.add_argument("--axis", choices=SWEEP_AXES)
        p.add_argument("--values", help="comma list of sweep values")


def _build_parser() -> _Parser:
    parser = _Parser(prog="colearner", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_bench_flags(sub.add_parser("run", help="run one benchmark cell"), sweep=False)
    _add_bench_flags(sub.add_parser("sweep", help="run a one-axis sweep"), sweep=True)
    plot = sub.add_parser("plot", help="render a results CSV to SVG")
    plot.add_argument("--in", dest="infile", required=True, help="input CSV")
    plot.add_argument("--out", required=True, help="output SVG path")
    plot.add_argument("--x", required=True, help="column for the x axis")
    plot.add_argument("--y", default="mse", help="numeric column for the y axis")
    plot.add_argument("--series", default="learner", help="column defining one line per value")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _fail(f"cannot read config {path}: {exc}")
    if not isinstance(raw, dict):
        raise _fail(f"config {path} must hold a flat JSON object")
    config = {}
    for key, value in raw.items():
        norm = key.replace("-", "_")
        if norm not in _DEFAULTS:
            raise _fail(f"unknown config key {key!r}")
        config[norm] = value
    return config


def _merge_options(args: argparse.Namespace, sweep: bool) -> dict:
    merged = dict(_DEFAULTS)
    if args.config:
        merged.update(_load_config(args.config))
    for key in _DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    if not sweep:
        merged["axis"] = None
        merged["values"] = None
    return merged


def _parse_learners(value) -> tuple[str, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(str(v) for v in value)
    return tuple(part.strip() for part in str(value).split(",") if part.strip())


def _parse_values(value) -> tuple[float, ...]:
    if value is None:
        return ()
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        return tuple(float(v) for v in items if str(v).strip() != "")
    except ValueError as exc:
        raise _fail(f"bad sweep values: {exc}")


def _echo_spec(merged: dict) -> None:
    print("spec: " + json.dumps(merged, sort_keys=True), file=sys.stderr)


def _agg_path(out: str) -> Path:
    return Path(out).with_suffix(".agg.csv")


def _print_aggregates(aggs) -> None:
    columns = ("scenario", "learner", "m", "jumps", "radius_T", "proportion", "bag_N",
               "reps_ok", "mse", "stderr")

    def fmt(a: AggregateRow, c: str) -> str:
        v = getattr(a, c)
        return f"{v:.6g}" if isinstance(v, float) else str(v)

    widths = {c: max(len(c), *(len(fmt(a, c)) for a in aggs)) for c in columns}
    print("  ".join(c.rjust(widths[c]) for c in columns))
    for a in aggs:
        print("  ".join(fmt(a, c).rjust(widths[c]) for c in columns))


def _cmd_bench(args: argparse.Namespace, sweep: bool) -> int:
    merged = _merge_options(args, sweep)
    if not merged["scenario"]:
        raise _fail("--scenario is required (flag or config)")
    if not merged["out"]:
        raise _fail("--out is required (flag or config)")
    learners = _parse_learners(merged["learners"])
    values = _parse_values(merged["values"])
    if sweep:
        if not merged["axis"]:
            raise _fail("--axis is required for sweep")
        if not values:
            raise _fail("--values is required for sweep")
    merged["learners"] = ",".join(learners)
    merged["values"] = list(values) if sweep else None
    _echo_spec(merged)
    try:
        spec = ExperimentSpec(
            scenario=merged["scenario"],
            m=int(merged["m"]),
            n0=int(merged["n0"]),
            n1=int(merged["n1"]),
            jumps=int(merged["jumps"]),
            learners=learners,
            repetitions=int(merged["reps"]),
            seed=int(merged["seed"]),
            noise_sigma=float(merged["noise"]),
            n_test=int(merged["n_test"]),
            co=CoConfig(
                radius=float(merged["radius"]),
                proportion=float(merged["proportion"]),
                forest=ForestConfig(n_trees=int(merged["trees"])),
            ),
            bag_n=int(merged["bag_n"]),
            sweep_axis=merged["axis"] if sweep else None,
            sweep_values=values,
            workers=int(merged["threads"]),
        )
    except (ParameterError, ValueError) as exc:
        raise _fail(str(exc))
    try:
        result = run_experiment(spec)
    except (ParameterError, DataError, NumericError) as exc:
        raise _fail(str(exc))
    try:
        write_rows_csv(result.rows, merged["out"])
        write_aggregates_csv(result.aggregates, _agg_path(merged["out"]))
    except OSError as exc:
        raise _fail(f"cannot write results: {exc}")
    _print_aggregates(result.aggregates)
    if result.n_failed:
        print(f"warning: {result.n_failed} of {len(result.rows)} fits failed", file=sys.stderr)
        return 2
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    try:
        with open(args.infile, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            for col in (args.x, args.y, args.series):
                if col not in fields:
                    raise DataError(f"column {col!r} not in {args.infile} (has {fields})")
            series_order: list[str] = []
            points: dict[str, list[tuple[float, float]]] = {}
            for row in reader:
                name = row[args.series]
                try:
                    x = float(row[args.x])
                    y = float(row[args.y])
                except (TypeError, ValueError) as exc:
                    raise DataError(f"non-numeric value in {args.infile}: {exc}")
                if name not in points:
                    series_order.append(name)
                    points[name] = []
                if math.isfinite(x) and math.isfinite(y):
                    points[name].append((x, y))
        svg = render_line_chart(
            [(name, points[name]) for name in series_order],
            x_label=args.x,
            y_label=args.y,
        )
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(svg)
    except (OSError, DataError) as exc:
        raise _fail(str(exc))
    return 0


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "run":
            return _cmd_bench(args, sweep=False)
        if args.command == "sweep":
            return _cmd_bench(args, sweep=True)
        return _cmd_plot(args)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
