"""hitdim command line: run / validate / list."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import EXPERIMENT_KINDS, ConfigError, load_config


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hitdim", description="Hitting-time and dimension experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute an experiment and write its report")
    run.add_argument("config")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--out", help="override the output directory")
    run.add_argument("--threads", type=int, help="worker threads for batch kernels")
    run.add_argument("--format", choices=("csv", "json", "both"), default="both")
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config")
    sub.add_parser("list", help="list registered experiment kinds")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        for kind in EXPERIMENT_KINDS:
            print(kind)
        return 0
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.command == "validate":
        print(f"{args.config}: ok ({cfg.kind}, {cfg.trials} trials)")
        return 0

    from .experiments import run_experiment
    from .report import emit_report

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.threads is not None:
        overrides["threads"] = max(1, args.threads)
    cfg = dataclasses.replace(cfg, **overrides)
    report = run_experiment(cfg)
    formats = ("csv", "json") if args.format == "both" else (args.format,)
    try:
        paths = emit_report(report, cfg.out_dir, formats)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return 2
    for name, v in report.verdicts.items():
        print(f"{'PASS' if v['passed'] else 'FAIL'}  {name}: {v['value']} vs {v['bound']}")
    for p in paths:
        print(f"wrote {p}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
