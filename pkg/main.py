"""
logstitch: system models from component-based execution logs

Usage:
    python main.py infer --input logs.csv --output model.json [--strategy prins|direct] [--dot]
    python main.py stitch-only --input logs.csv --output stitched.json
    python main.py project --input logs.csv --component Master
    python main.py evaluate --input logs.csv --folds 10 --output report.json
    python main.py scale --input logs.csv --factors 1,2,4,8 --timeout 600
    python main.py stats --input logs.csv
    python main.py gen --components 3 --logs 20 --seed 7 --output logs.csv
"""

from __future__ import annotations

import argparse
import importlib
import sys
from pathlib import Path

# command → module under commands/, imported on demand
DISPATCH = {
    "infer": "commands.infer",
    "stitch-only": "commands.infer",
    "project": "commands.project",
    "evaluate": "commands.evaluate",
    "scale": "commands.scale",
    "stats": "commands.stats",
    "gen": "commands.gen",
}


def _int_list(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from None


def _horizon(raw: str) -> int | None:
    if raw.lower() in ("inf", "infinity"):
        return None
    try:
        return int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'inf', got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    from config import (
        DEFAULT_ATTEMPTS,
        DEFAULT_FOLDS,
        DEFAULT_K,
        DEFAULT_SEED,
        DEFAULT_U,
        DEFAULT_WORKERS,
    )

    parser = argparse.ArgumentParser(
        prog="logstitch",
        description="Infer system models from component-based execution logs.",
    )
    parser.add_argument("command", choices=list(DISPATCH))
    parser.add_argument("--input", type=Path, help="structured log CSV ('-' for stdin)")
    parser.add_argument("--output", type=Path, help="artifact path (stdout when omitted)")
    parser.add_argument(
        "--strategy",
        choices=["prins", "prins-n", "direct"],
        help="default prins; scale compares the choice against direct",
    )
    parser.add_argument("--k", type=_horizon, default=DEFAULT_K, help="k-Tails horizon or 'inf'")
    parser.add_argument("--u", type=int, default=DEFAULT_U, help="merge threshold of HD_u")
    parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
    parser.add_argument("--factors", type=_int_list, default=[1, 2, 4, 8])
    parser.add_argument("--timeout", type=float, help="seconds per scalability run")
    parser.add_argument("--dot", action="store_true", help="also export GraphViz DOT")
    parser.add_argument("--component", help="component to project on")
    parser.add_argument("--guards", choices=["on", "off"], default="on")

    gen = parser.add_argument_group("gen")
    gen.add_argument("--components", type=int, default=3)
    gen.add_argument("--states", type=int, default=5)
    gen.add_argument("--logs", type=int, default=20)
    gen.add_argument("--max-length", type=int, default=30)
    gen.add_argument("--truth", type=Path, help="write ground-truth machines as JSON")

    ev = parser.add_argument_group("evaluate / scale")
    ev.add_argument("--repeats", type=int, default=1)
    ev.add_argument("--attempts", type=int, default=DEFAULT_ATTEMPTS)
    ev.add_argument("--parallel-folds", action="store_true")
    ev.add_argument("--u-values", type=_int_list, help="run the u sweep instead of timing")
    parser.add_argument("--log-level", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    from logstitch.errors import LogStitchError

    try:
        args = build_parser().parse_args(argv)
    except LogStitchError as exc:
        # bad environment defaults; the rich console is not set up yet
        print(f"error: {exc}", file=sys.stderr)
        return 1

    from rich.markup import escape

    from config import RunConfig, console, setup_logging

    setup_logging(args.log_level)
    try:
        cfg = RunConfig(
            command=args.command,
            input=args.input,
            output=args.output,
            strategy=args.strategy,
            k=args.k,
            u=args.u,
            workers=args.workers,
            seed=args.seed,
            folds=args.folds,
            factors=args.factors,
            timeout=args.timeout,
            dot=args.dot,
            component=args.component,
            guards=args.guards == "on",
            components=args.components,
            states=args.states,
            logs=args.logs,
            max_length=args.max_length,
            truth=args.truth,
            repeats=args.repeats,
            attempts=args.attempts,
            parallel_folds=args.parallel_folds,
            u_values=args.u_values,
        )
        module = importlib.import_module(DISPATCH[cfg.command])
        return module.run(cfg)
    except (LogStitchError, OSError) as exc:
        console.print(f"[bold red]error:[/] {escape(str(exc))}", highlight=False)
        return 1


if __name__ == "__main__":
    sys.exit(main())
