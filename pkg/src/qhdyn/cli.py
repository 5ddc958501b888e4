"""Command-line front end.

    qhdyn run <scenario.yaml> [--out DIR] [--override key.path=value ...]
    qhdyn sweep <scenario.yaml> --param key.path --values v1,v2,... \
        [--jobs N] [--out DIR] [--override ...]

Exit codes: 0 success, 1 check failure, 2 configuration error,
3 numerical-domain error (exceptional point / conditioning / complex
spectrum).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .errors import NumericalDomainError, ScenarioError
from .runner import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_ERROR,
    EXIT_OK,
    run,
    summary_text,
    sweep,
    sweep_summary_text,
    write_outputs,
)
from .scenario import apply_overrides, scenario_from_dict


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhdyn",
        description="Quasi-Hermitian quantum dynamics with time-dependent metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario file")
    p_run.add_argument("scenario", type=Path)
    p_run.add_argument("--out", type=Path, default=None, help="directory for CSV/summary/report")
    p_run.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY.PATH=VALUE",
        help="override a scenario entry (repeatable)",
    )

    p_sweep = sub.add_parser("sweep", help="run a scenario over a list of parameter values")
    p_sweep.add_argument("scenario", type=Path)
    p_sweep.add_argument("--param", required=True, help="dotted config path, e.g. time.dt")
    p_sweep.add_argument("--values", required=True, help="comma-separated value list")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel sweep points")
    p_sweep.add_argument("--out", type=Path, default=None)
    p_sweep.add_argument("--override", action="append", default=[], metavar="KEY.PATH=VALUE")
    return parser


def _load_raw(path: Path, overrides: list[str]) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario document is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario document must be a mapping at top level")
    raw.setdefault("name", path.stem)
    return apply_overrides(raw, overrides)


def _cmd_run(args) -> int:
    raw = _load_raw(args.scenario, args.override)
    config = scenario_from_dict(raw, name=raw.get("name", args.scenario.stem))
    report = run(config)
    sys.stdout.write(summary_text(report))
    if args.out is not None:
        run_dir = write_outputs(report, args.out)
        sys.stdout.write(f"outputs written to {run_dir}\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _parse_values(text: str) -> list:
    from .scenario import parse_scalar_text

    values = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if chunk:
            values.append(parse_scalar_text(chunk))
    return values


def _cmd_sweep(args) -> int:
    raw = _load_raw(args.scenario, args.override)
    values = _parse_values(args.values)
    points = sweep(raw, args.param, values, jobs=args.jobs, name=raw.get("name", args.scenario.stem))
    sys.stdout.write(sweep_summary_text(args.param, points))
    if args.out is not None and points:
        for p in points:
            if p.report is not None:
                write_outputs(p.report, args.out)
        sys.stdout.write(f"outputs written under {args.out}\n")
    if not points:
        return EXIT_OK
    return max(p.exit_code for p in points)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_sweep(args)
    except ScenarioError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except NumericalDomainError as exc:
        print(f"numerical-domain error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
