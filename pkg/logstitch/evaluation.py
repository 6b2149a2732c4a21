"""
Accuracy and timing harness.

k-fold cross validation over positive logs and mutation-synthesized
negatives, the log-component diversity score, duplication-factor timing
runs and the u sweep of hybrid determinization.
"""

from __future__ import annotations

import csv
import json
import logging
import multiprocessing
import queue as queue_module
import random
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from logstitch.automaton import accepts
from logstitch.determinization import hybrid_determinize
from logstitch.errors import EvaluationError, MutationError
from logstitch.inference import InferenceConfig
from logstitch.log_model import LogSet, duplicate, mutate_negative
from logstitch.pipeline import STAGES, get_strategy, run_prins

logger = logging.getLogger(__name__)

REPORT_HEADER = ["fold", "tp", "fn", "tn", "fp", "recall", "specificity", "ba"]
TIMING_HEADER = ["factor", "strategy", "stage", "seconds", "status"]
SWEEP_HEADER = ["u", "states", "transitions", "seconds"]


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    recall: Fraction | None
    specificity: Fraction | None
    balanced_accuracy: Fraction | None


def _ratio(num: int, den: int) -> Fraction | None:
    return Fraction(num, den) if den else None


def metrics(tp: int, fn: int, tn: int, fp: int) -> Metrics:
    """Exact rates; a rate with a zero denominator is None, never 0."""
    recall = _ratio(tp, tp + fn)
    specificity = _ratio(tn, tn + fp)
    ba = None if recall is None or specificity is None else (recall + specificity) / 2
    return Metrics(recall, specificity, ba)


def _fmt(value: Fraction | None) -> str:
    return "" if value is None else f"{float(value):.6f}"


# ---------------------------------------------------------------------------
# Cross validation
# ---------------------------------------------------------------------------


@dataclass
class FoldResult:
    fold: int
    tp: int = 0
    fn: int = 0
    tn: int = 0
    fp: int = 0
    negatives_exhausted: bool = False
    wall_times: dict[str, float] = field(default_factory=dict)

    @property
    def metrics(self) -> Metrics:
        return metrics(self.tp, self.fn, self.tn, self.fp)


@dataclass
class EvalReport:
    tp: int
    fn: int
    tn: int
    fp: int
    recall: Fraction | None
    specificity: Fraction | None
    balanced_accuracy: Fraction | None
    per_fold: list[FoldResult] = field(default_factory=list)
    wall_times: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @classmethod
    def from_folds(cls, folds: Sequence[FoldResult]) -> EvalReport:
        tp = sum(f.tp for f in folds)
        fn = sum(f.fn for f in folds)
        tn = sum(f.tn for f in folds)
        fp = sum(f.fp for f in folds)
        wall_times: dict[str, float] = {}
        for f in folds:
            for stage, seconds in f.wall_times.items():
                wall_times[stage] = wall_times.get(stage, 0.0) + seconds
        notes = [
            f"fold {f.fold}: negative synthesis exhausted, negatives excluded"
            for f in folds
            if f.negatives_exhausted
        ]
        m = metrics(tp, fn, tn, fp)
        return cls(
            tp, fn, tn, fp, m.recall, m.specificity, m.balanced_accuracy,
            list(folds), wall_times, notes,
        )

    def to_dict(self, include_timings: bool = False) -> dict:
        """JSON-ready view; rates as floats, timings only on request."""

        def rate(value: Fraction | None) -> float | None:
            return None if value is None else float(value)

        data = {
            "tp": self.tp,
            "fn": self.fn,
            "tn": self.tn,
            "fp": self.fp,
            "recall": rate(self.recall),
            "specificity": rate(self.specificity),
            "balanced_accuracy": rate(self.balanced_accuracy),
            "per_fold": [
                {
                    "fold": f.fold,
                    "tp": f.tp,
                    "fn": f.fn,
                    "tn": f.tn,
                    "fp": f.fp,
                    "negatives_exhausted": f.negatives_exhausted,
                }
                for f in self.per_fold
            ],
            "notes": self.notes,
        }
        if include_timings:
            data["wall_times"] = self.wall_times
        return data

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2) + "\n"

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for f in self.per_fold:
            m = f.metrics
            writer.writerow(
                [f.fold, f.tp, f.fn, f.tn, f.fp,
                 _fmt(m.recall), _fmt(m.specificity), _fmt(m.balanced_accuracy)]
            )
        writer.writerow(
            ["all", self.tp, self.fn, self.tn, self.fp,
             _fmt(self.recall), _fmt(self.specificity), _fmt(self.balanced_accuracy)]
        )


def split_folds(log_ids: Iterable[str], k: int, seed: int) -> list[list[str]]:
    """Seeded shuffle, then round-robin into ``k`` near-equal folds."""
    ids = sorted(log_ids)
    random.Random(seed).shuffle(ids)
    return [ids[i::k] for i in range(k)]


def _evaluate_fold(
    fold: int,
    test_ids: list[str],
    logs: LogSet,
    strategy: str,
    cfg: InferenceConfig,
    u: int,
    seed: int,
    attempts: int,
) -> FoldResult:
    test_set = set(test_ids)
    train = LogSet(tuple(log for log in logs if log.log_id not in test_set))
    test = logs.subset(test_ids)
    result = get_strategy(strategy)(train, cfg, u)
    out = FoldResult(fold, wall_times=dict(result.timings))

    for log in test:
        if accepts(result.model, log):
            out.tp += 1
        else:
            out.fn += 1

    try:
        negatives = mutate_negative(test, seed + fold, attempts, positives=logs)
    except MutationError:
        logger.warning("fold %d: could not synthesize any negative log", fold)
        out.negatives_exhausted = True
        return out
    for log in negatives:
        if accepts(result.model, log):
            out.fp += 1
        else:
            out.tn += 1
    logger.info("fold %d: tp=%d fn=%d tn=%d fp=%d", fold, out.tp, out.fn, out.tn, out.fp)
    return out


def kfold_evaluate(
    logs: LogSet,
    k: int,
    strategy: str,
    cfg: InferenceConfig,
    u: int = 1,
    seed: int = 0,
    attempts: int = 100,
    parallel: bool = False,
) -> EvalReport:
    if k < 2:
        raise EvaluationError(f"need at least 2 folds, got {k}")
    if len(logs) < k:
        raise EvaluationError(f"fewer logs ({len(logs)}) than folds ({k})")
    get_strategy(strategy)
    folds = split_folds((log.log_id for log in logs), k, seed)

    def run(i: int) -> FoldResult:
        return _evaluate_fold(i, folds[i], logs, strategy, cfg, u, seed, attempts)

    if parallel and cfg.max_workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
            results = list(pool.map(run, range(k)))
    else:
        results = [run(i) for i in range(k)]
    return EvalReport.from_folds(results)


# ---------------------------------------------------------------------------
# Log-component diversity
# ---------------------------------------------------------------------------


def lds(logs: LogSet) -> Fraction:
    """(U - 1) / (N - 1) with U the number of distinct per-log component sets."""
    n = len(logs)
    if n < 2:
        raise EvaluationError("log-component diversity needs at least two logs")
    distinct = len({log.components for log in logs})
    return Fraction(distinct - 1, n - 1)


# ---------------------------------------------------------------------------
# Timing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimingRow:
    factor: int
    strategy: str
    stage: str
    seconds: float | None
    status: str = "ok"


def _child_run(out, strategy: str, logs: LogSet, cfg: InferenceConfig, u: int) -> None:
    try:
        result = get_strategy(strategy)(logs, cfg, u)
        out.put(("ok", result.timings))
    except MemoryError:
        out.put(("out_of_memory", {}))
    except Exception as exc:
        out.put(("error", {"message": str(exc)}))


def _run_once(
    strategy: str, logs: LogSet, cfg: InferenceConfig, u: int, timeout: float | None
) -> tuple[str, dict]:
    if timeout is None:
        try:
            return "ok", get_strategy(strategy)(logs, cfg, u).timings
        except MemoryError:
            return "out_of_memory", {}

    ctx = multiprocessing.get_context()
    out = ctx.Queue()
    proc = ctx.Process(target=_child_run, args=(out, strategy, logs, cfg, u))
    proc.start()
    try:
        status, payload = out.get(timeout=timeout)
    except queue_module.Empty:
        proc.terminate()
        status, payload = "timeout", {}
    proc.join()
    if status == "error":
        raise EvaluationError(f"{strategy} run failed: {payload['message']}")
    return status, payload


def _stages_for(strategy: str) -> tuple[str, ...]:
    return ("inference",) if strategy == "direct" else STAGES


def scalability_run(
    logs: LogSet,
    factors: Sequence[int],
    strategies: Sequence[str],
    cfg: InferenceConfig,
    u: int = 1,
    timeout: float | None = None,
    repeats: int = 1,
) -> list[TimingRow]:
    """Median stage times per duplication factor and strategy."""
    if not factors:
        raise EvaluationError("no duplication factors given")
    if any(f < 1 for f in factors):
        raise EvaluationError("duplication factors must be >= 1")
    for name in strategies:
        get_strategy(name)

    rows: list[TimingRow] = []
    for factor in factors:
        scaled = duplicate(logs, factor)
        for name in strategies:
            stages = _stages_for(name)
            runs = []
            status = "ok"
            for _ in range(max(1, repeats)):
                status, timings = _run_once(name, scaled, cfg, u, timeout)
                if status != "ok":
                    logger.warning("factor %d, %s: %s", factor, name, status)
                    break
                runs.append(timings)
            if status != "ok":
                rows.extend(TimingRow(factor, name, s, None, status) for s in (*stages, "total"))
                continue
            for stage in stages:
                rows.append(
                    TimingRow(factor, name, stage, statistics.median(r[stage] for r in runs))
                )
            rows.append(
                TimingRow(factor, name, "total", statistics.median(sum(r.values()) for r in runs))
            )
    return rows


def write_timing_csv(rows: Iterable[TimingRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TIMING_HEADER)
    for r in rows:
        seconds = "" if r.seconds is None else f"{r.seconds:.6f}"
        writer.writerow([r.factor, r.strategy, r.stage, seconds, r.status])


@dataclass(frozen=True)
class SweepRow:
    u: int
    states: int
    transitions: int
    seconds: float


def hd_sweep(logs: LogSet, cfg: InferenceConfig, u_values: Sequence[int]) -> list[SweepRow]:
    """Determinize one stitched model with each ``u``; size and time per run."""
    if not u_values:
        raise EvaluationError("no u values given")
    if any(u < 0 for u in u_values):
        raise EvaluationError("u values must be >= 0")
    stitched = run_prins(logs, cfg, determinize=False).stitched
    rows = []
    for u in u_values:
        started = time.perf_counter()
        model = hybrid_determinize(stitched, u)
        rows.append(SweepRow(u, *model.size, time.perf_counter() - started))
    return rows


def write_sweep_csv(rows: Iterable[SweepRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([r.u, r.states, r.transitions, f"{r.seconds:.6f}"])
