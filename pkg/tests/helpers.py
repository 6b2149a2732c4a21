"""Builders and brute-force oracles shared by the tests."""

from __future__ import annotations

import re
from functools import lru_cache

from logstitch.automaton import ALWAYS_TRUE, Gfsm, Guard, Transition
from logstitch.log_model import Log, LogEntry, LogSet

_ENTRY = re.compile(r"^(?P<component>\w+)\.(?P<event>\w+)(?:\((?P<params>[^)]*)\))?$")


def entry(text: str) -> LogEntry:
    """``"Master.end(ok)"`` → LogEntry("Master", "end", ("ok",))."""
    match = _ENTRY.match(text)
    if match is None:
        raise ValueError(f"bad entry text: {text!r}")
    params = match["params"]
    return LogEntry(
        match["component"],
        match["event"],
        tuple(params.split(",")) if params else (),
    )


def log(log_id: str, *texts: str) -> Log:
    return Log(log_id, tuple(entry(s) for s in texts))


def logset(*logs: Log) -> LogSet:
    return LogSet(tuple(logs))


def machine(edges, finals, initial: int = 0, states=None) -> Gfsm:
    """Edges are (src, event, dst) or (src, event, {idx: values}, dst)."""
    transitions = []
    for edge in edges:
        if len(edge) == 3:
            src, event, dst = edge
            guard = ALWAYS_TRUE
        else:
            src, event, allowed, dst = edge
            guard = Guard.value_set(allowed)
        transitions.append(Transition(src, event, guard, dst))
    all_states = set(states or ()) | {initial} | set(finals)
    all_states |= {t.src for t in transitions} | {t.dst for t in transitions}
    return Gfsm(
        states=frozenset(all_states),
        alphabet=frozenset(t.event for t in transitions),
        transitions=frozenset(transitions),
        initial=initial,
        finals=frozenset(finals),
    )


def brute_force_words(m: Gfsm, max_len: int) -> set[tuple[str, ...]]:
    """Accepted words found by following individual runs; guards ignored."""

    @lru_cache(maxsize=None)
    def suffixes(state: int, budget: int) -> frozenset[tuple[str, ...]]:
        found = {()} if state in m.finals else set()
        if budget:
            for t in m.outgoing(state):
                found |= {(t.event, *rest) for rest in suffixes(t.dst, budget - 1)}
        return frozenset(found)

    return set(suffixes(m.initial, max_len))


def brute_force_accepts(m: Gfsm, entries) -> bool:
    """Depth-first search over single runs, one transition at a time."""
    entries = tuple(entries)

    def run(state: int, i: int) -> bool:
        if i == len(entries):
            return state in m.finals
        e = entries[i]
        return any(
            run(t.dst, i + 1)
            for t in m.transitions
            if t.src == state and t.event == e.event and t.guard.evaluate(e.params)
        )

    return run(m.initial, 0)
