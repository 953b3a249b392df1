"""Command-line entry point: render benchmark figures from a results directory."""

from __future__ import annotations

import argparse
import sys

from .figures import render_all
from .summary import METRICS, SchemaError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figures", description=__doc__)
    parser.add_argument("--in", dest="input_dir", required=True, help="directory containing summary.csv")
    parser.add_argument("--out", dest="output_dir", required=True, help="directory for the rendered images")
    parser.add_argument(
        "--metric",
        choices=sorted(METRICS),
        default=None,
        help="render only this metric (default: all)",
    )
    parser.add_argument(
        "--series",
        action="append",
        default=[],
        metavar="POLICY[:ALPHA]",
        help="restrict to these series; repeatable (default: all series)",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    metrics = None if args.metric is None else [args.metric]
    try:
        reports = render_all(args.input_dir, args.output_dir, metrics=metrics, series_filter=args.series)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for metric, report in reports.items():
        line = f"{metric}: {report.output_path} ({len(report.series)} series)"
        if report.note:
            line += f" — {report.note}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
