"""Command line front end: horolab <experiment> --config <file.json>.

Exit codes:
    0   experiment ran, outputs written
    2   precondition or configuration rejected
    3   schedule infeasible at the configured budget (outputs, if any,
        are written with the clamp flagged in the verdict)
    4   internal numeric certificate failure (reduction stall,
        quadrature refusing to settle, precision walls, ...)
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    HorolabError,
    NoApproximantFound,
    NotReduced,
    ScheduleInfeasible,
)
from .experiments import RUNNERS, emit, load_config, version_string

# CLI names are short; the config "experiment" field uses the canonical
# runner name.  A config may omit the field (the subcommand fills it in)
# but a mismatch is rejected.
SUBCOMMANDS = {
    "th11": "th11",
    "th12": "th12",
    "th13": "th13",
    "probe": "effective_probe",
    "expsum": "expsum_grid",
    "sieve": "sieve_grid",
    "dioph": "dioph",
    "period": "period",
}

OK, BAD_CONFIG, INFEASIBLE, NUMERIC_FAILURE = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horolab",
        description="sparse horocycle orbit experiments",
    )
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="command", required=True)
    for name, canonical in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {canonical} experiment")
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--max-n", type=int, default=None, dest="max_n")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    canonical = SUBCOMMANDS[args.command]
    try:
        with open(args.config, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return BAD_CONFIG

    declared = raw.get("experiment")
    if declared is None:
        raw["experiment"] = canonical
    elif declared != canonical:
        print(
            f"error: config declares experiment {declared!r} but the "
            f"subcommand runs {canonical!r}",
            file=sys.stderr,
        )
        return BAD_CONFIG

    overrides = {"threads": args.threads, "max_n": args.max_n}
    if args.out is not None:
        overrides["out"] = args.out
    try:
        config = _parse(raw, overrides)
        report = RUNNERS[canonical](config)
    except (ValueError, NotReduced, NoApproximantFound) as exc:
        print(f"error: precondition rejected: {exc}", file=sys.stderr)
        return BAD_CONFIG
    except ScheduleInfeasible as exc:
        print(f"error: schedule infeasible: {exc}", file=sys.stderr)
        return INFEASIBLE
    except HorolabError as exc:
        print(f"error: numeric certificate failure: "
              f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return NUMERIC_FAILURE

    out_dir = config.out or "results"
    csv_path, json_path = emit(report, out_dir)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    for key in ("case", "all_positive", "ratio_ok", "fitted_beta",
                "fitted_slope", "schedule_clamped", "minimal_certified"):
        if key in report.verdict:
            print(f"{key}: {report.verdict[key]}")
    if report.coverage is not None:
        print(f"coverage: {report.coverage}")
    if report.verdict.get("schedule_clamped"):
        return INFEASIBLE
    return OK


def _parse(raw: dict, overrides: dict):
    """Parse the merged config; overrides land in the echoed dict too."""
    from .experiments import parse_config

    merged = dict(raw)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return parse_config(merged)


if __name__ == "__main__":
    sys.exit(main())
