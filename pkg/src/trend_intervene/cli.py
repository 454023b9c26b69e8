"""Command-line entry points.

    trend-intervene analyze --config entries.csv [--alpha 0.05] [--out DIR]
                            [--seed N] [--jobs K] [--svg]
    trend-intervene check <csv>

The config file is a CSV with header ``csv_path,event_month,label``; relative
csv paths resolve against the config file's directory.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .errors import NoEntries, TrendIntervenError
from .gt_ingest import parse_gt_csv
from .pipeline import BatchConfig, run_batch


def _read_config(path: str) -> list[tuple[str, int, str]]:
    cfg = Path(path)
    entries = []
    with cfg.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"csv_path", "event_month", "label"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise NoEntries(f"config must have header csv_path,event_month,label, "
                            f"got {reader.fieldnames}")
        for row in reader:
            csv_path = Path(row["csv_path"])
            if not csv_path.is_absolute():
                csv_path = cfg.parent / csv_path
            entries.append((str(csv_path), int(row["event_month"]), row["label"]))
    if not entries:
        raise NoEntries(f"no entries in config {path}")
    return entries


def _cmd_analyze(args) -> int:
    config = BatchConfig(
        entries=_read_config(args.config),
        alpha=args.alpha,
        output_dir=args.out,
        seed=args.seed,
        parallelism=args.jobs,
        svg=args.svg,
    )
    status = run_batch(config)
    report = Path(args.out) / "report.csv"
    print(report.read_text(encoding="utf-8"), end="")
    if status != 0:
        print("some entries failed; see the diag/ folder", file=sys.stderr)
    return status


def _cmd_check(args) -> int:
    try:
        text = Path(args.csv).read_text(encoding="utf-8")
        series = parse_gt_csv(text)
    except (OSError, TrendIntervenError) as exc:
        print(f"INVALID: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"OK: query={series.query_name!r} months={len(series)} "
          f"span={series.month_label(0)}..{series.month_label(len(series) - 1)} "
          f"max={series.values.max():.0f} min={series.values.min():.0f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="trend-intervene",
        description="Evaluate whether monthly awareness events raise search interest.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the batch pipeline over a config of queries")
    analyze.add_argument("--config", required=True, help="CSV with header csv_path,event_month,label")
    analyze.add_argument("--alpha", type=float, default=0.05)
    analyze.add_argument("--out", default="out", help="output directory")
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--jobs", type=int, default=1, help="parallel workers")
    analyze.add_argument("--svg", action="store_true", help="also emit line-plot SVGs")
    analyze.set_defaults(func=_cmd_analyze)

    check = sub.add_parser("check", help="validate a single GT CSV export")
    check.add_argument("csv")
    check.set_defaults(func=_cmd_check)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TrendIntervenError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
