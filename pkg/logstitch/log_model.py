"""
Structured execution logs: parse, project, partition, duplicate, mutate.

A log is an ordered sequence of entries produced by one execution of a
component-based system. Order is positional; timestamps are carried but
never compared.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import groupby
from typing import Iterable, Iterator, TextIO

from logstitch.errors import (
    ConfigError,
    EmptyLogError,
    LogParseError,
    MutationError,
    UnknownComponentError,
)

logger = logging.getLogger(__name__)

CSV_HEADER = ["log_id", "seq", "timestamp", "component", "event", "params"]

# Sentinels padding a log on both sides for the mutation locality check.
_LOG_START = ("<start>",)
_LOG_END = ("<end>",)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogEntry:
    component: str
    event: str
    params: tuple[str, ...] = ()
    timestamp: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.component:
            raise LogParseError("log entry component cannot be empty")
        if not self.event:
            raise LogParseError("log entry event cannot be empty")
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def key(self) -> tuple:
        return (self.component, self.event, self.params)

    def __str__(self) -> str:
        args = ",".join(self.params)
        return f"{self.component}.{self.event}({args})"


@dataclass(frozen=True)
class Log:
    log_id: str
    entries: tuple[LogEntry, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[LogEntry]:
        return iter(self.entries)

    @property
    def components(self) -> frozenset[str]:
        return frozenset(e.component for e in self.entries)

    @property
    def keys(self) -> tuple[tuple, ...]:
        return tuple(e.key for e in self.entries)


@dataclass(frozen=True)
class LogSet:
    logs: tuple[Log, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "logs", tuple(self.logs))
        seen: set[str] = set()
        for log in self.logs:
            if log.log_id in seen:
                raise LogParseError(f"duplicate log id: {log.log_id!r}")
            seen.add(log.log_id)

    def __len__(self) -> int:
        return len(self.logs)

    def __iter__(self) -> Iterator[Log]:
        return iter(self.logs)

    def __getitem__(self, log_id: str) -> Log:
        return self.by_id[log_id]

    @cached_property
    def by_id(self) -> dict[str, Log]:
        return {log.log_id: log for log in self.logs}

    @cached_property
    def components(self) -> frozenset[str]:
        return frozenset(e.component for log in self.logs for e in log.entries)

    @property
    def entry_count(self) -> int:
        return sum(len(log) for log in self.logs)

    def subset(self, log_ids: Iterable[str]) -> LogSet:
        wanted = set(log_ids)
        return LogSet(tuple(log for log in self.logs if log.log_id in wanted))

    def distinct(self) -> LogSet:
        """First log of every distinct entry sequence, in input order."""
        seen: set[tuple] = set()
        kept = []
        for log in self.logs:
            keys = log.keys
            if keys not in seen:
                seen.add(keys)
                kept.append(log)
        return self if len(kept) == len(self.logs) else LogSet(tuple(kept))


@dataclass(frozen=True)
class LogStats:
    logs: int
    entries: int
    components: dict[str, int]
    alphabet_sizes: dict[str, int]
    mean_length: float
    max_length: int
    component_sets: int


# ---------------------------------------------------------------------------
# CSV / JSON
# ---------------------------------------------------------------------------


def _split_params(raw: str) -> tuple[str, ...]:
    """Split the params column on unescaped semicolons."""
    if raw == "":
        return ()
    values: list[str] = []
    current: list[str] = []
    chars = iter(raw)
    for ch in chars:
        if ch == "\\":
            nxt = next(chars, "")
            current.append(nxt if nxt in (";", "\\") else ch + nxt)
        elif ch == ";":
            values.append("".join(current))
            current = []
        else:
            current.append(ch)
    values.append("".join(current))
    return tuple(values)


def _join_params(params: tuple[str, ...]) -> str:
    return ";".join(p.replace("\\", "\\\\").replace(";", "\\;") for p in params)


def parse_logs(stream: TextIO) -> LogSet:
    """Read the structured-log CSV format into a LogSet.

    Entries are grouped by ``log_id`` (first appearance order) and sorted by
    ``seq``; rows with the same seq keep file order.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        return LogSet()
    if [h.strip() for h in header] != CSV_HEADER:
        raise LogParseError(f"expected header {','.join(CSV_HEADER)}", line=1)

    rows: dict[str, list[tuple[int, int, LogEntry]]] = defaultdict(list)
    seen: set[tuple[str, int]] = set()
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise LogParseError(
                f"expected {len(CSV_HEADER)} columns, got {len(row)}", line=line
            )
        log_id, seq_raw, timestamp, component, event, params = row
        if not log_id:
            raise LogParseError("empty log_id", line=line)
        try:
            seq = int(seq_raw)
        except ValueError:
            raise LogParseError(f"seq is not an integer: {seq_raw!r}", line=line) from None
        if seq < 0:
            raise LogParseError(f"seq must be non-negative: {seq}", line=line)
        if not component or not event:
            raise LogParseError("component and event must be non-empty", line=line)
        if (log_id, seq) in seen:
            raise LogParseError(f"duplicate seq {seq} for log {log_id!r}", line=line)
        seen.add((log_id, seq))
        entry = LogEntry(component, event, _split_params(params), timestamp or None)
        rows[log_id].append((seq, line, entry))

    logs = []
    for log_id, items in rows.items():
        items.sort(key=lambda item: (item[0], item[1]))
        logs.append(Log(log_id, tuple(entry for _, _, entry in items)))
    return LogSet(tuple(logs))


def parse_logs_text(text: str) -> LogSet:
    return parse_logs(io.StringIO(text))


def write_logs(logs: LogSet, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for log in logs:
        for seq, entry in enumerate(log.entries):
            writer.writerow(
                [
                    log.log_id,
                    seq,
                    entry.timestamp or "",
                    entry.component,
                    entry.event,
                    _join_params(entry.params),
                ]
            )


def logs_to_csv(logs: LogSet) -> str:
    buf = io.StringIO()
    write_logs(logs, buf)
    return buf.getvalue()


def logset_to_json(logs: LogSet) -> str:
    payload = {
        "logs": [
            {
                "log_id": log.log_id,
                "entries": [
                    {
                        "seq": seq,
                        "timestamp": e.timestamp,
                        "component": e.component,
                        "event": e.event,
                        "params": list(e.params),
                    }
                    for seq, e in enumerate(log.entries)
                ],
            }
            for log in logs
        ]
    }
    return json.dumps(payload, indent=2)


def logset_from_json(text: str) -> LogSet:
    try:
        payload = json.loads(text)
        return LogSet(
            tuple(
                Log(
                    item["log_id"],
                    tuple(
                        LogEntry(
                            e["component"],
                            e["event"],
                            tuple(e.get("params", ())),
                            e.get("timestamp"),
                        )
                        for e in sorted(item["entries"], key=lambda e: e.get("seq", 0))
                    ),
                )
                for item in payload["logs"]
            )
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise LogParseError(f"invalid log JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def project(logs: LogSet, component: str) -> LogSet:
    """Keep only the entries of ``component``; logs left empty are dropped."""
    if component not in logs.components:
        raise UnknownComponentError(component)
    projected = []
    for log in logs:
        entries = tuple(e for e in log.entries if e.component == component)
        if entries:
            projected.append(Log(log.log_id, entries))
    return LogSet(tuple(projected))


def partition(log: Log) -> list[tuple[str, Log]]:
    """Split a log into maximal runs of entries from the same component."""
    if not log.entries:
        raise EmptyLogError(f"cannot partition empty log {log.log_id!r}")
    return [
        (component, Log(log.log_id, tuple(run)))
        for component, run in groupby(log.entries, key=lambda e: e.component)
    ]


def duplicate(logs: LogSet, factor: int) -> LogSet:
    """Repeat every log ``factor`` times under fresh ids."""
    if factor < 1:
        raise ConfigError(f"duplication factor must be >= 1, got {factor}")
    copies = [
        Log(f"{log.log_id}#{copy}", log.entries)
        for copy in range(factor)
        for log in logs
    ]
    return LogSet(tuple(copies))


def stats(logs: LogSet) -> LogStats:
    per_component = Counter(e.component for log in logs for e in log.entries)
    alphabets: dict[str, set[str]] = defaultdict(set)
    for log in logs:
        for e in log.entries:
            alphabets[e.component].add(e.event)
    lengths = [len(log) for log in logs]
    return LogStats(
        logs=len(logs),
        entries=sum(lengths),
        components=dict(sorted(per_component.items())),
        alphabet_sizes={c: len(alphabets[c]) for c in sorted(alphabets)},
        mean_length=(sum(lengths) / len(lengths)) if lengths else 0.0,
        max_length=max(lengths, default=0),
        component_sets=len({log.components for log in logs}),
    )


# ---------------------------------------------------------------------------
# Negative log synthesis
# ---------------------------------------------------------------------------


class _WindowIndex:
    """Contiguous windows of the padded positive logs, indexed lazily by length."""

    def __init__(self, positives: LogSet):
        self._padded = [(_LOG_START, *log.keys, _LOG_END) for log in positives]
        self._by_length: dict[int, set[tuple]] = {}

    def __contains__(self, window: tuple) -> bool:
        size = len(window)
        if size not in self._by_length:
            self._by_length[size] = {
                seq[i : i + size]
                for seq in self._padded
                for i in range(len(seq) - size + 1)
            }
        return window in self._by_length[size]


def swap_entries(entries: tuple, i: int, j: int) -> tuple:
    items = list(entries)
    items[i], items[j] = items[j], items[i]
    return tuple(items)


def delete_entry(entries: tuple, i: int) -> tuple:
    return entries[:i] + entries[i + 1 :]


def insert_entry(entries: tuple, i: int, entry) -> tuple:
    return entries[:i] + (entry,) + entries[i:]


def _mutate_once(
    rng: random.Random, entries: tuple[LogEntry, ...], pool: list[LogEntry]
) -> tuple[tuple[LogEntry, ...], int, int]:
    """Apply one random operator.

    Returns the mutated entries plus the span (lo, hi) of the padded mutated
    sequence that forms the locality window.
    """
    operators = ["swap", "delete", "insert"] if pool else ["swap", "delete"]
    op = rng.choice(operators)
    n = len(entries)
    if op == "swap":
        i, j = sorted(rng.sample(range(n), 2))
        # padded index = list index + 1; window covers i-1 .. j+1
        return swap_entries(entries, i, j), i, j + 2
    if op == "delete":
        i = rng.randrange(n)
        # the neighbours that become adjacent
        return delete_entry(entries, i), i, i + 1
    i = rng.randrange(n + 1)
    return insert_entry(entries, i, rng.choice(pool)), i, i + 2


def mutate_negative(
    logs: LogSet,
    seed: int,
    per_log_attempts: int = 100,
    positives: LogSet | None = None,
) -> LogSet:
    """Synthesize one presumably infeasible log per input log.

    Each negative is produced by swapping, deleting or inserting an entry. It
    is kept only if the window around the mutation (the mutated entries and
    one neighbour on each side, log boundaries included) never occurs
    contiguously in a positive log. ``positives`` defaults to ``logs`` and is
    also the pool for inserted entries (entries of the other executions).
    """
    positives = positives if positives is not None else logs
    index = _WindowIndex(positives)
    rng = random.Random(seed)
    negatives: list[Log] = []
    for log in logs:
        if len(log) < 2:
            logger.warning("skipping log %s: fewer than two entries", log.log_id)
            continue
        pool = [e for other in positives if other.log_id != log.log_id for e in other.entries]
        for _ in range(per_log_attempts):
            mutated, lo, hi = _mutate_once(rng, log.entries, pool)
            padded = (_LOG_START, *(e.key for e in mutated), _LOG_END)
            if padded[lo : hi + 1] not in index:
                negatives.append(Log(f"{log.log_id}-neg", mutated))
                break
        else:
            logger.warning(
                "no valid mutation for log %s after %d attempts", log.log_id, per_log_attempts
            )
    if not negatives:
        raise MutationError("cannot synthesize negatives")
    return LogSet(tuple(negatives))
