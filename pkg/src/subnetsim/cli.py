"""Command-line entry points.

Exit codes: 0 on success, 2 for configuration problems, 3 for runtime
failures during simulation or file handling.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import link_adaptation as la
from .config import ConfigError, RunConfig, emit_defaults, parse_config
from .runner import run_simulation, summarize_directory

log = logging.getLogger("subnetsim")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subnetsim",
        description="Subnetwork interference prediction and link adaptation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate drops and write records plus summaries")
    run_p.add_argument("--config", help="INI config; defaults apply when omitted")
    run_p.add_argument("--seed", type=int, help="override the root seed")
    run_p.add_argument("--drops", type=int, help="override the number of drops")
    run_p.add_argument("--ttis", type=int, help="override TTIs per drop")
    run_p.add_argument("--predictors", help="comma list, e.g. ekf,ma,genie")
    run_p.add_argument("--out", required=True, help="output directory")

    table_p = sub.add_parser("table", help="write an MCS table CSV")
    group = table_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--analytic", action="store_true", help="build the analytic table")
    group.add_argument("--load", help="load and revalidate an existing table CSV")
    table_p.add_argument("--out", required=True, help="output CSV path")
    table_p.add_argument("--packet-bits", type=int, default=160)

    sum_p = sub.add_parser("summarize", help="recompute summaries from stored records")
    sum_p.add_argument("--in", dest="in_dir", required=True, help="run output directory")

    dump_p = sub.add_parser("defaults", help="print the default configuration")
    del dump_p
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config) if args.config else RunConfig()
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.drops is not None:
        overrides["n_drops"] = args.drops
    if args.ttis is not None:
        overrides["n_ttis"] = args.ttis
    if args.predictors:
        overrides["predictors"] = tuple(
            p.strip().lower() for p in args.predictors.split(",") if p.strip()
        )
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    cfg.validate()
    _, summary = run_simulation(cfg, args.out)
    for name, entry in summary["predictors"].items():
        rae_part = entry.get("rae") or {}
        med = rae_part.get("median")
        frac = entry["bler"]["fraction_meeting_target"]
        log.info(
            "%s: median RAE %s, fraction meeting target %s",
            name,
            f"{med:.4g}" if med is not None else "n/a",
            f"{frac:.4f}" if frac is not None else "n/a",
        )
    print(f"wrote records and summaries to {args.out}")
    return EXIT_OK


def _cmd_table(args: argparse.Namespace) -> int:
    table = la.load_mcs_table(args.load) if args.load else la.build_mcs_table(args.packet_bits)
    la.save_mcs_table(table, args.out)
    print(f"wrote {len(table)} MCS entries to {args.out}")
    return EXIT_OK


def _cmd_summarize(args: argparse.Namespace) -> int:
    summary = summarize_directory(args.in_dir)
    for name, entry in summary["predictors"].items():
        rae_part = entry.get("rae") or {}
        print(
            f"{name}: n={summary['n_records']}"
            f" median_rae={rae_part.get('median')}"
            f" meets_target={entry['bler']['fraction_meeting_target']}"
        )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "table":
            return _cmd_table(args)
        if args.command == "summarize":
            return _cmd_summarize(args)
        if args.command == "defaults":
            print(emit_defaults(), end="")
            return EXIT_OK
        raise AssertionError("unreachable")
    except (ConfigError, la.ParseError, la.MonotonicityViolation) as exc:
        log.error("configuration: %s", exc)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.error("runtime failure: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
