"""Command-line entry point.

Subcommands map one-to-one onto the experiment runners; every run reads a
JSON experiment config, writes <out>/rows.csv and <out>/report.json (plus
rendered figures unless --no-figures), and exits 0 when every summary check
passed, 1 when any failed, 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .experiments import (
    ConfigError,
    RUNNERS,
    load_spec,
)

_SUBCOMMANDS = {
    "validate-theorem1": "validate_theorem1",
    "waiting-time": "waiting_time_sweep",
    "tl-compare": "tl_comparison",
    "optimize": "optimize",
    "bounds": "bounds",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetcache",
        description="Caching experiments for stochastic-geometry heterogeneous networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, kind in _SUBCOMMANDS.items():
        p = sub.add_parser(command, help=f"run a {kind} experiment")
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory for rows.csv/report.json")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")
        p.add_argument("--workers", type=int, default=None, help="override the worker count")
        p.add_argument(
            "--no-figures", action="store_true", help="skip rendering figures to <out>/figures"
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind = _SUBCOMMANDS[args.command]
    try:
        spec = load_spec(args.config)
        overrides = {}
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed", f"must be nonnegative, got {args.seed}")
            overrides["seed"] = args.seed
        if args.trials is not None:
            if args.trials < 1:
                raise ConfigError("--trials", f"must be >= 1, got {args.trials}")
            overrides["trials"] = args.trials
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers", f"must be >= 1, got {args.workers}")
            overrides["workers"] = args.workers
        if args.out is not None:
            overrides["out_dir"] = args.out
        if overrides:
            spec = dataclasses.replace(spec, **overrides)
        if spec.kind != kind:
            raise ConfigError(
                "spec.kind", f"config declares {spec.kind!r} but subcommand expects {kind!r}"
            )
        if spec.out_dir is None and kind != "bounds":
            raise ConfigError("spec.out_dir", "give an output directory (--out or out_dir)")
        report = RUNNERS[kind](spec)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    if kind == "bounds":
        print(json.dumps(report.summary["evaluation"], indent=2, sort_keys=True))
    if spec.out_dir is not None:
        paths = report.write(spec.out_dir)
        written = [str(paths["rows"]), str(paths["report"])]
        if not args.no_figures:
            from . import figures

            written += [str(p) for p in figures.render_report(report, spec.out_dir)]
        print("wrote " + ", ".join(written))

    checks = report.summary.get("checks", {})
    for name, ok in checks.items():
        print(f"check {name}: {'pass' if ok else 'FAIL'}")
    for skipped in report.summary.get("skipped", []):
        print(f"check skipped: {skipped}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
