"""Command-line entry point: run, sweep, spectrum, and validate scenarios."""

from __future__ import annotations

import argparse
import os
import sys

from .errors import QsyncError, ValidationError
from .runner import RunArtifact, export, run_scenario, run_sweep
from .scenario import load_scenario


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="path to a scenario JSON file")
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument("--format", default="csv,json",
                        help="comma-separated list of csv,json,svg (default: csv,json)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps (default: QSYNC_THREADS or 1)")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("QSYNC_THREADS", "")
    return max(1, int(env)) if env.isdigit() else 1


def _formats(args) -> list[str]:
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    for fmt in formats:
        if fmt not in ("csv", "json", "svg"):
            raise ValidationError(f"unknown export format {fmt!r}")
    return formats


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsync",
        description="Transient synchronization in open quantum systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "run a scenario and export trajectories and analyses"),
        ("sweep", "run a scenario's two-parameter sweep"),
        ("spectrum", "export the Liouvillian spectrum and gap report"),
        ("validate", "check a scenario file and exit"),
    ):
        p = sub.add_parser(name, help=text)
        if name == "validate":
            p.add_argument("scenario", help="path to a scenario JSON file")
        else:
            _add_common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        if args.command == "validate":
            print(f"OK: {scenario.name} ({scenario.kind})")
            return 0
        formats = _formats(args)
        if args.command == "run":
            artifact = run_scenario(scenario)
        elif args.command == "sweep":
            artifact = run_sweep(scenario, threads=_threads(args))
        else:  # spectrum
            if scenario.kind == "harmonic":
                raise ValidationError(
                    "spectrum requires a spin scenario (harmonic kinds have no Liouvillian)"
                )
            full = run_scenario(scenario)
            artifact = RunArtifact(f"{scenario.name}_spectrum", scenario.kind,
                                   full.provenance, spectrum=full.spectrum,
                                   model_info=full.model_info)
            gap = full.spectrum["gap"]
            print(f"slow_rate={gap['slow_rate']:.6g} next_rate={gap['next_rate']:.6g} "
                  f"gap_ratio={gap['gap_ratio']:.6g} "
                  f"degenerate_frequencies={gap['degenerate_frequencies']}")
        paths = export(artifact, formats, args.out)
        for path in paths:
            print(path)
        return 0
    except QsyncError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
