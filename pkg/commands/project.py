"""Projection of system logs onto one component."""

from __future__ import annotations

from commands.common import load_logs, write_artifact
from config import RunConfig, console
from logstitch.errors import ConfigError
from logstitch.log_model import logs_to_csv, project


def run(cfg: RunConfig) -> int:
    if not cfg.component:
        raise ConfigError("project needs --component")
    logs = load_logs(cfg)
    projected = project(logs, cfg.component)
    write_artifact(cfg.output, logs_to_csv(projected))
    console.print(
        f"[green]{cfg.component}[/]: {len(projected)} logs, {projected.entry_count} entries",
        highlight=False,
    )
    return 0
