"""Synthetic corpus with ground-truth component machines."""

from __future__ import annotations

from commands.common import write_artifact
from config import RunConfig, console
from logstitch.log_model import logs_to_csv
from logstitch.synthetic import generate_corpus


def run(cfg: RunConfig) -> int:
    corpus = generate_corpus(cfg.components, cfg.states, cfg.logs, cfg.max_length, cfg.seed)
    write_artifact(cfg.output, logs_to_csv(corpus.logs))
    if cfg.truth is not None:
        write_artifact(cfg.truth, corpus.truth_json())
    console.print(
        f"generated {len(corpus.logs)} logs, {corpus.logs.entry_count} entries, "
        f"{len(corpus.truth)} components (seed {cfg.seed})",
        highlight=False,
    )
    return 0
