"""
Infer a system model (``infer``) or stop before determinization (``stitch-only``).
"""

from __future__ import annotations

import json

from rich.panel import Panel

from commands.common import load_logs, sibling, write_artifact
from config import RunConfig, console
from logstitch.automaton import accepts, is_deterministic, to_dot, to_json
from logstitch.errors import EmptyLogError
from logstitch.pipeline import get_strategy, run_prins


def run(cfg: RunConfig) -> int:
    logs = load_logs(cfg)
    if not len(logs):
        raise EmptyLogError("no logs")

    icfg = cfg.inference_config()
    if cfg.command == "stitch-only":
        result = run_prins(logs, icfg, cfg.u, determinize=False)
    else:
        result = get_strategy(cfg.strategy_name)(logs, icfg, cfg.u)
    model = result.model

    if cfg.output is None:
        write_artifact(None, to_dot(model) if cfg.dot else to_json(model))
    else:
        write_artifact(cfg.output, to_json(model))
        if cfg.dot:
            write_artifact(sibling(cfg.output, ".dot"), to_dot(model))
        timings = {stage: round(seconds, 6) for stage, seconds in result.timings.items()}
        write_artifact(sibling(cfg.output, ".timings.json"), json.dumps(timings, indent=2) + "\n")

    accepted = sum(accepts(model, log) for log in logs)
    states, transitions = model.size
    console.print(
        Panel(
            f"logs: {len(logs)}  components: {len(logs.components)}\n"
            f"states: {states}  transitions: {transitions}\n"
            f"deterministic: {is_deterministic(model)}  "
            f"training logs accepted: {accepted}/{len(logs)}",
            title=f"{cfg.command} ({'prins' if cfg.command == 'stitch-only' else cfg.strategy_name})",
            border_style="cyan",
        )
    )
    return 0
