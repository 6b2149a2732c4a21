"""
Hybrid determinization: bounded target-state merging, then powerset.

Target states of the same (source, event, guard) are merged as long as none
of them has already been merged ``u`` times. Whatever nondeterminism is left
is removed by the subset construction. The language of the result always
contains the language of the input.
"""

from __future__ import annotations

import heapq
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import count, groupby
from typing import Iterable

from logstitch.automaton import Gfsm, Guard, Transition, canonical, is_deterministic
from logstitch.errors import ConfigError

logger = logging.getLogger(__name__)

Label = tuple[str, Guard]


@dataclass
class MergeLedger:
    """How many merge operations each state has gone through."""

    counts: dict[int, int] = field(default_factory=dict)

    def count(self, state: int) -> int:
        return self.counts.get(state, 0)

    def record(self, survivor: int, merged: Iterable[int]) -> None:
        merged = list(merged)
        self.counts[survivor] = 1 + max(self.count(s) for s in merged)
        for s in merged:
            if s != survivor:
                self.counts.pop(s, None)


def get_target_states_with_limit(m: Gfsm, ledger: MergeLedger, u: int) -> frozenset[int]:
    """First group of same-label targets still mergeable under threshold ``u``.

    Groups are scanned in ascending (source, event, guard) order; states that
    already went through ``u`` merges are left out. Empty when nothing is left.
    """
    for _, group in groupby(m.sorted_transitions(), key=lambda t: t.sort_key[:3]):
        targets = frozenset(t.dst for t in group if ledger.count(t.dst) < u)
        if len(targets) > 1:
            return targets
    return frozenset()


def _widen(labels: dict[Guard, set[int]]) -> dict[Guard, set[int]]:
    """Join overlapping guards of one event until the rest are pairwise disjoint."""
    labels = {g: set(d) for g, d in labels.items()}
    while True:
        guards = sorted(labels, key=lambda g: g.sort_key)
        pair = next(
            ((a, b) for i, a in enumerate(guards) for b in guards[i + 1 :] if a.overlaps(b)),
            None,
        )
        if pair is None:
            return labels
        a, b = pair
        targets = labels.pop(a) | labels.pop(b)
        joined = a.join(b)
        labels.setdefault(joined, set()).update(targets)


class _Graph:
    """Mutable adjacency view with both directions indexed."""

    def __init__(self, m: Gfsm):
        self.states = set(m.states)
        self.initial = m.initial
        self.finals = set(m.finals)
        self.alphabet = set(m.alphabet)
        self.labels = dict(m.labels)
        self.out: dict[int, dict[Label, set[int]]] = defaultdict(lambda: defaultdict(set))
        self.inc: dict[int, set[tuple[int, Label]]] = defaultdict(set)
        for t in m.transitions:
            self.add(t.src, t.label, t.dst)

    def add(self, src: int, label: Label, dst: int) -> None:
        self.out[src][label].add(dst)
        self.inc[dst].add((src, label))

    def remove(self, src: int, label: Label, dst: int) -> None:
        targets = self.out[src][label]
        targets.discard(dst)
        if not targets:
            del self.out[src][label]
        self.inc[dst].discard((src, label))

    def widen(self, state: int) -> None:
        """Replace overlapping unequal guards on the same event by their join."""
        out = self.out.get(state)
        if not out or all(guard.is_always_true for _, guard in out):
            return
        by_event: dict[str, dict[Guard, set[int]]] = defaultdict(dict)
        for (event, guard), targets in self.out[state].items():
            by_event[event][guard] = set(targets)
        for event, labels in by_event.items():
            widened = _widen(labels)
            if widened == labels:
                continue
            for guard, targets in labels.items():
                for dst in targets:
                    self.remove(state, (event, guard), dst)
            for guard, targets in widened.items():
                for dst in targets:
                    self.add(state, (event, guard), dst)

    def merge(self, states: Iterable[int]) -> tuple[int, set[int]]:
        """Fold ``states`` into the smallest one; returns it and the touched sources."""
        states = sorted(states)
        survivor, others = states[0], set(states[1:])

        def rename(s: int) -> int:
            return survivor if s in others else s

        edges = set()
        for s in others:
            edges |= {(s, label, d) for label, ds in self.out.get(s, {}).items() for d in ds}
            edges |= {(p, label, s) for p, label in self.inc.get(s, ())}
        for src, label, dst in edges:
            self.remove(src, label, dst)
        for src, label, dst in edges:
            self.add(rename(src), label, rename(dst))

        if self.finals & others:
            self.finals = (self.finals - others) | {survivor}
        if self.initial in others:
            self.initial = survivor
        merged_label: tuple[str, ...] = ()
        for s in states:
            merged_label += self.labels.pop(s, ())
        if merged_label:
            self.labels[survivor] = merged_label
        for s in others:
            self.out.pop(s, None)
            self.inc.pop(s, None)
        self.states -= others
        return survivor, {rename(src) for src, _, _ in edges}

    def build(self) -> Gfsm:
        return Gfsm(
            states=frozenset(self.states),
            alphabet=frozenset(self.alphabet),
            transitions=frozenset(
                Transition(src, event, guard, dst)
                for src, labels in self.out.items()
                for (event, guard), targets in labels.items()
                for dst in targets
            ),
            initial=self.initial,
            finals=frozenset(self.finals),
            labels=self.labels,
        )


def _merge_with_limit(m: Gfsm, u: int, ledger: MergeLedger) -> Gfsm:
    """Repeat the threshold scan and merge until it comes back empty.

    Groups are kept in a heap ordered like the scan; only groups whose
    targets changed are re-queued, so each pop sees what a full rescan
    would have returned first.
    """
    graph = _Graph(m)
    for s in sorted(graph.states):
        graph.widen(s)

    tie = count()
    heap: list = []

    def push(src: int) -> None:
        for event, guard in graph.out.get(src, {}):
            heapq.heappush(heap, (src, event, guard.sort_key, next(tie), guard))

    for s in graph.states:
        push(s)

    merges = 0
    while heap:
        src, event, _, _, guard = heapq.heappop(heap)
        if src not in graph.states:
            continue
        targets = {
            d for d in graph.out[src].get((event, guard), ()) if ledger.count(d) < u
        }
        if len(targets) < 2:
            continue
        survivor, touched = graph.merge(targets)
        ledger.record(survivor, targets)
        graph.widen(survivor)
        merges += 1
        for s in sorted(touched | {survivor}):
            push(s)
    logger.debug("hybrid determinization performed %d merges (u=%d)", merges, u)
    return graph.build()


def powerset(m: Gfsm) -> Gfsm:
    """Subset construction over (event, guard) labels."""
    start = frozenset({m.initial})
    index = {start: 0}
    queue = deque([start])
    transitions: set[Transition] = set()
    while queue:
        subset = queue.popleft()
        by_event: dict[str, dict[Guard, set[int]]] = defaultdict(lambda: defaultdict(set))
        for s in subset:
            for t in m.outgoing(s):
                by_event[t.event][t.guard].add(t.dst)
        for event in sorted(by_event):
            widened = _widen(by_event[event])
            for guard in sorted(widened, key=lambda g: g.sort_key):
                target = frozenset(widened[guard])
                if target not in index:
                    index[target] = len(index)
                    queue.append(target)
                transitions.add(Transition(index[subset], event, guard, index[target]))
    return canonical(
        Gfsm(
            states=frozenset(index.values()),
            alphabet=m.alphabet,
            transitions=frozenset(transitions),
            initial=0,
            finals=frozenset(i for subset, i in index.items() if subset & m.finals),
        )
    )


def hybrid_determinize(m: Gfsm, u: int, ledger: MergeLedger | None = None) -> Gfsm:
    """HD_u: bounded merging, then powerset for whatever nondeterminism remains."""
    if u < 0:
        raise ConfigError(f"u must be >= 0, got {u}")
    merged = _merge_with_limit(m, u, ledger if ledger is not None else MergeLedger())
    if is_deterministic(merged):
        return canonical(merged)
    logger.debug("falling back to powerset on %d states", len(merged.states))
    return powerset(merged)
