"""Command line front-end: ``capnet {network,capacity,verify,report}``."""
from __future__ import annotations

import argparse
import sys

from .config import ConfigError, RunConfig
from .dsl import DSLError
from .exceptions import CapnetError, NetworkFormatError
from .report import render, run

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _eps_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid eps list {text!r}") from None


def _param(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key} needs a numeric value") from None


def _terminals(text):
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("terminals are two vertex ids, e.g. 0,3")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError("terminals must be integers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="capnet", description="Capacities of metastable landscapes via electrical networks.")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    helps = {
        "network": "capacity, voltages, currents and pruning of a network file",
        "capacity": "landscape pipeline: critical points, islands, network capacity per eps",
        "verify": "network prediction against the finite-difference oracle per eps",
        "report": "re-emit a saved JSON report as csv or json",
    }
    for mode, text in helps.items():
        p = sub.add_parser(mode, help=text, description=text)
        p.add_argument("--input", help="network file, landscape YAML, or saved report")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte equality)")
        if mode == "network":
            p.add_argument("--terminals", type=_terminals, help="override the file's terminals, e.g. 0,3")
        if mode in ("capacity", "verify"):
            p.add_argument("--catalog", help="built-in landscape name")
            p.add_argument("--param", type=_param, action="append", default=[], metavar="K=V")
            p.add_argument("--eps", type=_eps_list, default=[], help="comma-separated noise levels")
            p.add_argument("--grid", type=int, help="grid size for the topology stage")
            p.add_argument("--delta", type=float, help="override the bridge cutoff delta")
        if mode == "verify":
            p.add_argument("--oracle-grid", type=int, help="oracle grid size (default from file, else 400)")
            p.add_argument("--snapshot", help="prefix for binary solution snapshots")
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        mode=args.mode, input=args.input, catalog=getattr(args, "catalog", None),
        params=dict(getattr(args, "param", [])), eps=tuple(getattr(args, "eps", [])),
        grid_n=getattr(args, "grid", None), oracle_grid=getattr(args, "oracle_grid", None),
        delta=getattr(args, "delta", None), out=args.out, format=args.format,
        terminals=getattr(args, "terminals", None), timing=args.timing,
        snapshot=getattr(args, "snapshot", None))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        parser.error(str(exc))
    try:
        report = run(cfg)
    except (OSError, NetworkFormatError, DSLError, ConfigError) as exc:
        print(f"capnet: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CapnetError, ArithmeticError, ValueError) as exc:
        print(f"capnet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
