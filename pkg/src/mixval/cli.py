"""Command-line interface.

Subcommands: ``simulate`` (emit a simulated dataset + descriptors as CSV),
``split`` (emit fold membership for one strategy), ``run`` (full
experiment from a config file and/or flags), ``report`` (pretty-print an
existing report). Exit codes: 0 success, 1 config or ingest error, 2
runtime error; failures print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ConfigError, IngestError, InvalidConfig, MixvalError, ParseError, RaggedRows
from .harness import (
    config_from_items,
    load_source,
    parse_config_file,
    run_experiment,
    split_rows,
)
from .io import write_descriptor_csv, write_mixture_csv, write_split_csv
from .report import csv_path_for, format_report, read_report, write_report
from .simulate import SimConfig, simulate

_CONFIG_EXIT_ERRORS = (ConfigError, IngestError, InvalidConfig, ParseError,
                       RaggedRows)


class _Parser(argparse.ArgumentParser):
    # uniform machine-readable failure line + config-error exit code for
    # bad command lines
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("UsageError", message)
        raise SystemExit(1)


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _add_override_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("-k", "--folds", type=int, dest="folds", help="fold count")
    p.add_argument("--strategy", action="append",
                   help="validation strategy (repeatable)")
    p.add_argument("--mode", action="append",
                   help="descriptor mode (repeatable)")
    p.add_argument("--metric", action="append", help="metric (repeatable)")
    p.add_argument("--mixtures", help="mixture CSV (switches source to files)")
    p.add_argument("--descriptors", help="descriptor CSV")
    p.add_argument("--output", help="output path")


def _items_from_args(args) -> dict[str, str]:
    items = parse_config_file(args.config) if args.config else {}
    if args.seed is not None:
        items["seed"] = str(args.seed)
    if args.folds is not None:
        items["k"] = str(args.folds)
    if args.strategy:
        items["strategies"] = ",".join(args.strategy)
    if args.mode:
        items["modes"] = ",".join(args.mode)
    if args.metric:
        items["metrics"] = ",".join(args.metric)
    if args.mixtures:
        items["source"] = "files"
        items["mixtures"] = args.mixtures
    if args.descriptors:
        items["descriptors"] = args.descriptors
    if args.output:
        items["output"] = args.output
    return items


def _cmd_simulate(args) -> int:
    config = SimConfig(
        n_drugs=args.drugs,
        arity=args.arity,
        noise_variance=args.noise_variance,
        noise_std=args.noise_std,
        fingerprint_length=args.fingerprint_length,
        seed=args.seed,
    )
    result = simulate(config)
    os.makedirs(args.out_dir, exist_ok=True)
    mixtures_path = os.path.join(args.out_dir, "mixtures.csv")
    descriptors_path = os.path.join(args.out_dir, "descriptors.csv")
    write_mixture_csv(result.dataset, mixtures_path)
    write_descriptor_csv(result.descriptors, descriptors_path)
    print(f"wrote {mixtures_path} ({len(result.dataset.records)} mixtures)")
    print(f"wrote {descriptors_path} ({len(result.descriptors.vectors)} constituents)")
    return 0


def _cmd_split(args) -> int:
    config = config_from_items(_items_from_args(args))
    dataset, _, _ = load_source(config)
    strategy = args.strategy[0] if args.strategy else config.strategies[0]
    rows = split_rows(dataset, strategy, config.k, config.seed)
    path = config.output or "splits.csv"
    write_split_csv(rows, path)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _cmd_run(args) -> int:
    config = config_from_items(_items_from_args(args))
    report = run_experiment(config)
    path = config.output or "report.json"
    write_report(report, path)
    print(f"wrote {path} and {csv_path_for(path)}")
    return 0


def _cmd_report(args) -> int:
    report = read_report(args.path)
    sys.stdout.write(format_report(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixval",
                     description="mixture-aware model validation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="emit a simulated dataset",
                       description="Write mixtures.csv and descriptors.csv "
                                   "for a simulated mixture dataset.")
    p.add_argument("-D", "--drugs", type=int, default=32)
    p.add_argument("-N", "--arity", type=int, default=3)
    p.add_argument("--noise-variance", type=float, default=0.5)
    p.add_argument("--noise-std", type=float, default=None)
    p.add_argument("-L", "--fingerprint-length", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("split", help="emit fold membership lists",
                       description="Write key,fold,role,stratum rows for one "
                                   "strategy, exactly as `run` would split.")
    _add_override_flags(p)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("run", help="run a full experiment",
                       description="Run strategies x modes x folds and write "
                                   "a JSON report plus flat CSV.")
    _add_override_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="pretty-print a report",
                       description="Render an existing JSON report as text.")
    p.add_argument("path")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        # argparse --help exits 0; usage errors already emitted JSON
        code = exc.code if isinstance(exc.code, int) else 1
        return code
    except _CONFIG_EXIT_ERRORS as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except MixvalError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2
    except OSError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
