"""Duplication-factor timing runs, or the u sweep with ``--u-values``."""

from __future__ import annotations

import io

from rich.table import Table

from commands.common import load_logs, write_artifact
from config import RunConfig, console
from logstitch.evaluation import hd_sweep, scalability_run, write_sweep_csv, write_timing_csv

STRATEGIES = ("prins", "prins-n", "direct")


def _strategies(cfg: RunConfig) -> tuple[str, ...]:
    if cfg.strategy is None:
        return STRATEGIES
    return tuple(dict.fromkeys((cfg.strategy, "direct")))


def run(cfg: RunConfig) -> int:
    logs = load_logs(cfg)
    icfg = cfg.inference_config()
    buf = io.StringIO()

    if cfg.u_values:
        rows = hd_sweep(logs, icfg, cfg.u_values)
        write_sweep_csv(rows, buf)
        table = Table(title="hybrid determinization sweep")
        for column in ("u", "states", "transitions", "seconds"):
            table.add_column(column, justify="right")
        for r in rows:
            table.add_row(str(r.u), str(r.states), str(r.transitions), f"{r.seconds:.3f}")
    else:
        strategies = _strategies(cfg)
        rows = scalability_run(
            logs, cfg.factors, strategies, icfg, cfg.u, cfg.timeout, cfg.repeats
        )
        write_timing_csv(rows, buf)
        table = Table(title="scalability (total seconds)")
        table.add_column("factor", justify="right")
        for name in strategies:
            table.add_column(name, justify="right")
        for factor in cfg.factors:
            cells = []
            for name in strategies:
                row = next(
                    r for r in rows
                    if r.factor == factor and r.strategy == name and r.stage == "total"
                )
                cells.append(row.status if row.seconds is None else f"{row.seconds:.3f}")
            table.add_row(str(factor), *cells)

    write_artifact(cfg.output, buf.getvalue())
    console.print(table)
    return 0
