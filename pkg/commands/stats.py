"""Descriptive statistics of a log file."""

from __future__ import annotations

import json

from rich.table import Table

from commands.common import load_logs, write_artifact
from config import RunConfig, console
from logstitch.evaluation import lds
from logstitch.log_model import stats


def run(cfg: RunConfig) -> int:
    logs = load_logs(cfg)
    s = stats(logs)
    diversity = lds(logs) if len(logs) >= 2 else None

    payload = {
        "logs": s.logs,
        "entries": s.entries,
        "components": s.components,
        "alphabet_sizes": s.alphabet_sizes,
        "mean_length": round(s.mean_length, 6),
        "max_length": s.max_length,
        "component_sets": s.component_sets,
        "lds": None if diversity is None else str(diversity),
    }
    write_artifact(cfg.output, json.dumps(payload, indent=2) + "\n")

    table = Table(title="components")
    table.add_column("component")
    table.add_column("entries", justify="right")
    table.add_column("events", justify="right")
    for name, count in s.components.items():
        table.add_row(name, str(count), str(s.alphabet_sizes[name]))
    console.print(table)
    console.print(
        f"{s.logs} logs, {s.entries} entries, mean length {s.mean_length:.1f}, "
        f"LDS {'-' if diversity is None else diversity}",
        highlight=False,
    )
    return 0
