"""Command line interface.

Exit codes: 0 success, 2 config error, 3 dispersive-regime refusal,
4 oracle-check failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import ConfigError, DomainError, IntervalError, RegimeError
from .scenarios import load_config, preset_config, preset_names, run_scenario, sample_measurements
from .scenarios.config import parse_config
from .scenarios.presets import ORACLE_CHECK
from .scenarios.runner import ORACLE_TOL

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_ORACLE = 0, 2, 3, 4


def _global_options(parser, suppress=False):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--threads", type=int, default=default if suppress else 1, metavar="N",
                        help="worker threads for grid evaluation (default 1)")
    parser.add_argument("--seed", type=int, default=default, metavar="N",
                        help="override the config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jcpath", description="Two-cavity path-superposition simulator.")
    parser.add_argument("--version", action="version", version=f"jcpath {__version__}")
    _global_options(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate a scenario config")
    p.add_argument("config", help="path to an INI scenario config")
    p.add_argument("--out", help="CSV path (default: the config's output field, else stdout)")
    p.add_argument("--shots", type=int, help="sample this many measurement shots instead")
    _global_options(p, suppress=True)

    p = sub.add_parser("preset", help="evaluate a named figure preset")
    p.add_argument("name")
    p.add_argument("--out", help="CSV path (default stdout)")
    _global_options(p, suppress=True)

    p = sub.add_parser("list-presets", help="list the figure presets")
    _global_options(p, suppress=True)

    p = sub.add_parser("check", help="compare closed forms with the state-vector simulation")
    p.add_argument("--cases", type=int, help="number of random scenarios (default 200)")
    _global_options(p, suppress=True)
    return parser


def _emit(table, out):
    if out:
        table.write(out)
    else:
        sys.stdout.write(table.to_csv())


def _run(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if args.shots is not None:
        table = sample_measurements(cfg, args.shots)
    else:
        table = run_scenario(cfg, threads=args.threads)
    _emit(table, args.out or cfg.output)
    return EXIT_OK


def _preset(args):
    cfg = preset_config(args.name)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    _emit(run_scenario(cfg, threads=args.threads), args.out)
    return EXIT_OK


def _list(args):
    for name in preset_names():
        cfg = preset_config(name)
        print(f"{name}\t{cfg.kind}\t{cfg.units or '-'}")
    return EXIT_OK


def _check(args):
    text = ORACLE_CHECK
    if args.cases is not None:
        text = text.replace("cases = 200", f"cases = {args.cases}")
    cfg = parse_config(text)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    table = run_scenario(cfg, threads=args.threads)
    worst = table.column("max_error")
    failed = int((worst > ORACLE_TOL).sum())
    for name in table.columns[1:-1]:
        print(f"{name:20s} max |analytic - simulated| = {table.column(name).max():.3e}")
    status = "PASS" if failed == 0 else "FAIL"
    print(f"{status}: {len(worst) - failed}/{len(worst)} scenarios within {ORACLE_TOL:g}")
    return EXIT_OK if failed == 0 else EXIT_ORACLE


_COMMANDS = {"run": _run, "preset": _preset, "list-presets": _list, "check": _check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except RegimeError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ConfigError, DomainError, IntervalError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
