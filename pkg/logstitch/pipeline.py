"""
End-to-end inference strategies.

Each strategy is a function decorated with @strategy, which registers it in
STRATEGY_REGISTRY under the name used on the command line.
"""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

from logstitch.automaton import Gfsm
from logstitch.determinization import hybrid_determinize
from logstitch.errors import ConfigError, EmptyLogError
from logstitch.inference import InferenceConfig, infer_direct, infer_projections, project_all
from logstitch.log_model import LogSet
from logstitch.stitching import stitch

logger = logging.getLogger(__name__)

STAGES = ("projection", "inference", "stitching", "determinization")


@dataclass
class PipelineResult:
    model: Gfsm
    stitched: Gfsm | None = None
    component_models: dict[str, Gfsm] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def total_seconds(self) -> float:
        return sum(self.timings.values())


@contextmanager
def _timed(timings: dict[str, float], stage: str) -> Iterator[None]:
    started = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = time.perf_counter() - started
        logger.info("stage %s took %.3fs", stage, timings[stage])


# ---------------------------------------------------------------------------
# Strategy registry
# ---------------------------------------------------------------------------

Strategy = Callable[[LogSet, InferenceConfig, int], PipelineResult]
STRATEGY_REGISTRY: dict[str, Strategy] = {}


def strategy(name: str):
    """Decorator that registers a pipeline under ``name``."""

    def decorator(func: Strategy) -> Strategy:
        STRATEGY_REGISTRY[name] = func
        return func

    return decorator


def get_strategy(name: str) -> Strategy:
    try:
        return STRATEGY_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(STRATEGY_REGISTRY))
        raise ConfigError(f"unknown strategy {name!r} (known: {known})") from None


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


def run_prins(
    logs: LogSet, cfg: InferenceConfig, u: int = 1, determinize: bool = True
) -> PipelineResult:
    """Projection, per-component inference, stitching, determinization."""
    if not len(logs):
        raise EmptyLogError("no logs")
    timings: dict[str, float] = {}
    with _timed(timings, "projection"):
        projections = project_all(logs.distinct())
    with _timed(timings, "inference"):
        models = infer_projections(projections, cfg)
    with _timed(timings, "stitching"):
        stitched = stitch(logs, models)
    if not determinize:
        return PipelineResult(stitched, stitched, models, timings)
    with _timed(timings, "determinization"):
        model = hybrid_determinize(stitched, u)
    return PipelineResult(model, stitched, models, timings)


def run_direct(logs: LogSet, cfg: InferenceConfig) -> PipelineResult:
    """Whole-system k-Tails, the baseline the stitched pipeline is compared to."""
    if not len(logs):
        raise EmptyLogError("no logs")
    timings: dict[str, float] = {}
    with _timed(timings, "inference"):
        model = infer_direct(logs, cfg)
    return PipelineResult(model, timings=timings)


@strategy("prins")
def _prins(logs: LogSet, cfg: InferenceConfig, u: int) -> PipelineResult:
    return run_prins(logs, cfg, u)


@strategy("prins-n")
def _prins_sequential(logs: LogSet, cfg: InferenceConfig, u: int) -> PipelineResult:
    return run_prins(logs, replace(cfg, max_workers=1), u)


@strategy("direct")
def _direct(logs: LogSet, cfg: InferenceConfig, u: int) -> PipelineResult:
    return run_direct(logs, cfg)
