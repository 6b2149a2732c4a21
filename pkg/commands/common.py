"""Input/output helpers shared by the commands."""

from __future__ import annotations

import sys
from pathlib import Path

from config import RunConfig
from logstitch.errors import ConfigError
from logstitch.log_model import LogSet, parse_logs


def load_logs(cfg: RunConfig) -> LogSet:
    if cfg.input is None:
        raise ConfigError(f"{cfg.command} needs --input")
    if str(cfg.input) == "-":
        return parse_logs(sys.stdin)
    with open(cfg.input, newline="", encoding="utf-8") as f:
        return parse_logs(f)


def write_artifact(path: Path | None, text: str) -> None:
    """Write to ``path``, or to standard output when no path is given."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(text)


def sibling(path: Path, suffix: str) -> Path:
    """``model.json`` → ``model.dot``, ``model.timings.json`` and so on."""
    return path.with_name(path.stem + suffix)
