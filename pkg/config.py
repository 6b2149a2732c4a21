"""Shared config: loads run defaults from .env"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler

from logstitch.errors import ConfigError
from logstitch.inference import InferenceConfig

load_dotenv()

COMMANDS = ("infer", "project", "stitch-only", "evaluate", "scale", "stats", "gen")

# diagnostics and summaries only; artifacts never go through this console
console = Console(stderr=True)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


DEFAULT_K = _env_int("LOGSTITCH_K", 2)
DEFAULT_U = _env_int("LOGSTITCH_U", 1)
DEFAULT_WORKERS = _env_int("LOGSTITCH_WORKERS", min(os.cpu_count() or 1, 4))
DEFAULT_SEED = _env_int("LOGSTITCH_SEED", 0)
DEFAULT_FOLDS = _env_int("LOGSTITCH_FOLDS", 10)
DEFAULT_ATTEMPTS = _env_int("LOGSTITCH_ATTEMPTS", 100)
LOG_LEVEL = os.getenv("LOGSTITCH_LOG_LEVEL", "WARNING")


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    # None: prins for infer and evaluate, every strategy for scale
    strategy: str | None = None
    k: int | None = DEFAULT_K
    u: int = DEFAULT_U
    workers: int = DEFAULT_WORKERS
    seed: int = DEFAULT_SEED
    folds: int = DEFAULT_FOLDS
    factors: list[int] = field(default_factory=lambda: [1, 2, 4, 8])
    timeout: float | None = None
    dot: bool = False
    component: str | None = None
    guards: bool = True
    # gen
    components: int = 3
    states: int = 5
    logs: int = 20
    max_length: int = 30
    truth: Path | None = None
    # evaluate / scale
    repeats: int = 1
    attempts: int = DEFAULT_ATTEMPTS
    parallel_folds: bool = False
    u_values: list[int] | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command: {self.command!r}")
        if self.k is not None and self.k < 0:
            raise ConfigError(f"k must be >= 0, got {self.k}")
        if self.u < 0:
            raise ConfigError(f"u must be >= 0, got {self.u}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if self.timeout is not None and self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.attempts < 1:
            raise ConfigError(f"attempts must be >= 1, got {self.attempts}")
        if not self.factors or any(f < 1 for f in self.factors):
            raise ConfigError(f"factors must be >= 1, got {self.factors}")
        if self.u_values is not None and any(u < 0 for u in self.u_values):
            raise ConfigError(f"u values must be >= 0, got {self.u_values}")

    @property
    def strategy_name(self) -> str:
        return self.strategy or "prins"

    def inference_config(self) -> InferenceConfig:
        return InferenceConfig(k=self.k, max_workers=self.workers, guard_synthesis=self.guards)


def setup_logging(level: str | None = None) -> None:
    """Route library logging through rich on standard error."""
    logging.basicConfig(
        level=(level or LOG_LEVEL).upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )
