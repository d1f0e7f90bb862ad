"""Command line entry point: ``ris-lab {panel-a,panel-b,panel-c,validate}``.

Exit codes: 0 success, 2 configuration error, 3 numeric failure (including a
failed validation check).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments
from .config import ConfigError, ScenarioConfig, load_config
from .specfun import QuadratureError

log = logging.getLogger("ris_lab")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_PANELS = {
    "panel-a": ("panel_a.csv", lambda cfg, w: experiments.run_panel_a(cfg, w)),
    "panel-b": ("panel_b.csv", lambda cfg, w: experiments.run_panel_b(cfg)),
    "panel-c": ("panel_c.csv", lambda cfg, w: experiments.run_panel_c(cfg, w)),
}


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ris-lab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario file (reference defaults when omitted)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory for CSV files")
    common.add_argument("--seed", type=_u64, help="override the base seed")
    common.add_argument("--samples", type=_positive, help="override the Monte-Carlo sample count")
    common.add_argument("--workers", type=_positive, default=1,
                        help="Monte-Carlo worker threads (capped by RIS_LAB_THREADS)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _PANELS:
        sub.add_parser(name, parents=[common], help=f"write {_PANELS[name][0]}")
    sub.add_parser("validate", parents=[common], help="run the closed-form vs oracle cross-checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        cfg = cfg.with_overrides(seed=args.seed, samples=args.samples)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "validate":
            checks = experiments.validate(cfg, args.workers)
            for c in checks:
                print(c.line())
            return EXIT_OK if all(c.passed is not False for c in checks) else EXIT_NUMERIC
        filename, run = _PANELS[args.command]
        table = run(cfg, args.workers)
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / filename
        experiments.emit_csv(table, path)
        log.info("wrote %d rows to %s", len(table.rows), path)
        print(path)
    except (QuadratureError, ArithmeticError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
