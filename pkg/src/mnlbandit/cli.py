"""Command-line entry points: run a configured experiment, analyze its summary."""

from __future__ import annotations

import argparse
import sys

from .harness import ExperimentConfig, run_experiment, write_outputs
from .rates import write_rates_report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mnl-bandit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("--config", required=True, help="path to the experiment config")
    run_p.add_argument("--out-dir", default=None, help="output directory (defaults to the config's output_dir)")
    run_p.add_argument("--workers", type=int, default=1, help="worker processes for trials")
    run_p.add_argument("--seed", type=int, default=None, help="override the config's master seed")

    rates_p = sub.add_parser("rates", help="fit decay rates and trade-off products from a summary")
    rates_p.add_argument("--in", dest="summary", required=True, help="path to summary.csv")
    rates_p.add_argument("--out", dest="out", required=True, help="path for the JSON report")
    rates_p.add_argument(
        "--t-points",
        type=int,
        nargs="*",
        default=None,
        help="restrict fits to these horizon values (default: all rows)",
    )
    rates_p.add_argument("--delta", type=float, default=0.05, help="failure probability for coverage")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        config = ExperimentConfig.from_file(args.config)
        if args.seed is not None:
            config = ExperimentConfig.from_json_dict(
                {**config.to_json_dict(), "master_seed": args.seed}
            )
        out_dir = args.out_dir or config.output_dir
        if not out_dir:
            print("error: no output directory given (config output_dir or --out-dir)", file=sys.stderr)
            return 2
        if args.workers < 1:
            print("error: --workers must be at least 1", file=sys.stderr)
            return 2
        result = run_experiment(config, workers=args.workers)
        paths = write_outputs(result, out_dir)
        if result.failures:
            print(f"warning: {len(result.failures)} trial(s) failed; see the manifest", file=sys.stderr)
        for name, path in paths.items():
            print(f"{name}: {path}")
        return 0
    if args.command == "rates":
        report = write_rates_report(args.summary, args.out, t_points=args.t_points, delta=args.delta)
        status = "ok" if report.get("all_ok") else "check failed tolerances"
        print(f"rates report written to {args.out} ({status})")
        return 0
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
