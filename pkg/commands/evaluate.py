"""k-fold cross validation of a strategy on positive and synthesized negative logs."""

from __future__ import annotations

import io
import json

from rich.table import Table

from commands.common import load_logs, sibling, write_artifact
from config import RunConfig, console
from logstitch.evaluation import EvalReport, kfold_evaluate


def _summary(report: EvalReport, title: str) -> Table:
    table = Table(title=title)
    for column in ("fold", "tp", "fn", "tn", "fp", "recall", "specificity", "ba"):
        table.add_column(column, justify="right")

    def pct(value) -> str:
        return "-" if value is None else f"{float(value):.3f}"

    for f in report.per_fold:
        m = f.metrics
        table.add_row(
            str(f.fold), str(f.tp), str(f.fn), str(f.tn), str(f.fp),
            pct(m.recall), pct(m.specificity), pct(m.balanced_accuracy),
        )
    table.add_row(
        "all", str(report.tp), str(report.fn), str(report.tn), str(report.fp),
        pct(report.recall), pct(report.specificity), pct(report.balanced_accuracy),
        style="bold",
    )
    return table


def run(cfg: RunConfig) -> int:
    logs = load_logs(cfg)
    report = kfold_evaluate(
        logs,
        cfg.folds,
        cfg.strategy_name,
        cfg.inference_config(),
        u=cfg.u,
        seed=cfg.seed,
        attempts=cfg.attempts,
        parallel=cfg.parallel_folds,
    )

    buf = io.StringIO()
    report.write_csv(buf)
    if cfg.output is None:
        write_artifact(None, buf.getvalue())
    else:
        write_artifact(cfg.output, report.to_json())
        write_artifact(sibling(cfg.output, ".csv"), buf.getvalue())
        write_artifact(
            sibling(cfg.output, ".timings.json"),
            json.dumps({k: round(v, 6) for k, v in report.wall_times.items()}, indent=2) + "\n",
        )

    title = f"{cfg.folds}-fold evaluation ({cfg.strategy_name}, u={cfg.u})"
    console.print(_summary(report, title))
    for note in report.notes:
        console.print(f"[yellow]note:[/] {note}", highlight=False)
    return 0
