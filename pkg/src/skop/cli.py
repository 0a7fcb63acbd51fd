"""Command-line entry point.

Verbs: ``certify``, ``convergence``, ``modular``, ``reconstruct``.  Every
verb reads one config file and writes its report(s) into --out.  Exit
codes: 0 success, 1 config error, 2 numeric failure, 3 bound violation
under --strict.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import BoundViolation, ConfigError, NumericError
from .pipelines import (
    run_certify,
    run_convergence,
    run_modular,
    run_reconstruct,
    write_reconstruct_csv,
    write_report,
)

_PIPELINES = {
    "certify": run_certify,
    "convergence": run_convergence,
    "modular": run_modular,
    "reconstruct": run_reconstruct,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skop",
        description="Sampling-series reconstruction laboratory: certification, "
        "convergence and modular-error experiments.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in _PIPELINES:
        sp = sub.add_parser(verb, help=f"run the {verb} pipeline")
        sp.add_argument("--config", required=True, help="experiment config file")
        sp.add_argument("--out", default="out", help="output directory (default: out)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for per-w jobs")
        sp.add_argument("--verbose", action="store_true", help="per-step progress on stdout")
        sp.add_argument(
            "--strict", action="store_true", help="exit 3 when a measured error exceeds its bound"
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        report = _PIPELINES[args.verb](cfg, threads=args.threads, verbose=args.verbose)
        if args.verb == "reconstruct":
            write_reconstruct_csv(args.out, report)
            slim = {k: v for k, v in report.items() if k not in ("grid", "values", "signal_values")}
            write_report(args.out, "reconstruct", slim, rows=None)
        else:
            write_report(args.out, args.verb, report, rows=report.get("rows"))
        violations = report.get("violations", 0)
        if args.strict and violations:
            raise BoundViolation(f"{violations} bound violation(s)")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except BoundViolation as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
