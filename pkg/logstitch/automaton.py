"""
Guarded finite state machines (gFSM).

A transition fires on an entry when the event matches and the guard accepts
the entry's parameter values. State ids are opaque integers; provenance
labels are diagnostics only and never take part in equality.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from logstitch.errors import ModelError, NondeterministicModelError
from logstitch.log_model import Log, LogEntry

# ---------------------------------------------------------------------------
# Guards and transitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Guard:
    """Either always true (no constraints) or a per-index allowed value set."""

    constraints: tuple[tuple[int, frozenset[str]], ...] = ()

    @classmethod
    def value_set(cls, allowed: Mapping[int, Iterable[str]]) -> Guard:
        constraints = []
        for idx, values in sorted(allowed.items()):
            values = frozenset(values)
            if idx < 0 or not values:
                raise ModelError(f"invalid value_set constraint at index {idx}")
            constraints.append((idx, values))
        return cls(tuple(constraints))

    @property
    def kind(self) -> str:
        return "value_set" if self.constraints else "always_true"

    @property
    def is_always_true(self) -> bool:
        return not self.constraints

    def evaluate(self, params: Sequence[str]) -> bool:
        return all(
            idx < len(params) and params[idx] in allowed for idx, allowed in self.constraints
        )

    def overlaps(self, other: Guard) -> bool:
        """True when some parameter vector satisfies both guards."""
        mine = dict(self.constraints)
        return all(
            mine[idx] & allowed for idx, allowed in other.constraints if idx in mine
        )

    def join(self, other: Guard) -> Guard:
        """Least guard implied by both: indices constrained by both, values united."""
        mine = dict(self.constraints)
        joined = {
            idx: mine[idx] | allowed for idx, allowed in other.constraints if idx in mine
        }
        return Guard.value_set(joined) if joined else ALWAYS_TRUE

    @cached_property
    def sort_key(self) -> tuple:
        if not self.constraints:
            return (0, ())
        return (1, tuple((idx, tuple(sorted(values))) for idx, values in self.constraints))

    def to_dict(self) -> dict:
        if not self.constraints:
            return {"kind": "always_true"}
        return {
            "kind": "value_set",
            "params": {str(idx): sorted(values) for idx, values in self.constraints},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> Guard:
        kind = data.get("kind")
        if kind == "always_true":
            return ALWAYS_TRUE
        if kind == "value_set":
            return cls.value_set({int(idx): values for idx, values in data["params"].items()})
        raise ModelError(f"unknown guard kind: {kind!r}")

    def __str__(self) -> str:
        if not self.constraints:
            return "true"
        return " & ".join(
            f"p{idx} in {{{','.join(sorted(values))}}}" for idx, values in self.constraints
        )


ALWAYS_TRUE = Guard()


@dataclass(frozen=True)
class Transition:
    src: int
    event: str
    guard: Guard
    dst: int

    @property
    def label(self) -> tuple[str, Guard]:
        return (self.event, self.guard)

    @property
    def sort_key(self) -> tuple:
        return (self.src, self.event, self.guard.sort_key, self.dst)


# ---------------------------------------------------------------------------
# Gfsm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gfsm:
    states: frozenset[int]
    alphabet: frozenset[str]
    transitions: frozenset[Transition]
    initial: int
    finals: frozenset[int]
    labels: Mapping[int, tuple[str, ...]] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for name in ("states", "alphabet", "transitions", "finals"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.initial not in self.states:
            raise ModelError(f"initial state {self.initial} is not a state")
        if not self.finals <= self.states:
            raise ModelError(f"final states {sorted(self.finals - self.states)} are not states")
        for t in self.transitions:
            if t.src not in self.states or t.dst not in self.states:
                raise ModelError(f"transition {t} references an unknown state")
            if t.event not in self.alphabet:
                raise ModelError(f"transition event {t.event!r} is not in the alphabet")

    @cached_property
    def _outgoing(self) -> dict[int, tuple[Transition, ...]]:
        out: dict[int, list[Transition]] = defaultdict(list)
        for t in self.transitions:
            out[t.src].append(t)
        return {s: tuple(sorted(ts, key=lambda t: t.sort_key)) for s, ts in out.items()}

    def outgoing(self, state: int) -> tuple[Transition, ...]:
        return self._outgoing.get(state, ())

    def sorted_transitions(self) -> list[Transition]:
        return sorted(self.transitions, key=lambda t: t.sort_key)

    @property
    def size(self) -> tuple[int, int]:
        return (len(self.states), len(self.transitions))


class GfsmBuilder:
    """Mutable staging area for building machines."""

    def __init__(self) -> None:
        self.states: set[int] = set()
        self.alphabet: set[str] = set()
        self.transitions: set[Transition] = set()
        self.initial: int | None = None
        self.finals: set[int] = set()
        self.labels: dict[int, tuple[str, ...]] = {}
        self._next = 0

    @classmethod
    def from_gfsm(cls, m: Gfsm) -> GfsmBuilder:
        builder = cls()
        for s in m.states:
            builder.add_state(s, m.labels.get(s, ()))
        builder.alphabet = set(m.alphabet)
        builder.transitions = set(m.transitions)
        builder.initial = m.initial
        builder.finals = set(m.finals)
        return builder

    @property
    def next_id(self) -> int:
        return self._next

    def add_state(self, state: int | None = None, label: tuple[str, ...] = ()) -> int:
        if state is None:
            state = self._next
        self.states.add(state)
        self._next = max(self._next, state + 1)
        if label:
            self.labels[state] = tuple(label)
        return state

    def add_transition(self, src: int, event: str, guard: Guard, dst: int) -> None:
        self.alphabet.add(event)
        self.transitions.add(Transition(src, event, guard, dst))

    def build(self) -> Gfsm:
        if self.initial is None:
            raise ModelError("machine has no initial state")
        return Gfsm(
            states=frozenset(self.states),
            alphabet=frozenset(self.alphabet),
            transitions=frozenset(self.transitions),
            initial=self.initial,
            finals=frozenset(self.finals),
            labels={s: l for s, l in self.labels.items() if s in self.states and l},
        )


# ---------------------------------------------------------------------------
# Semantics
# ---------------------------------------------------------------------------


def step(m: Gfsm, state: int, entry: LogEntry) -> frozenset[int]:
    return frozenset(
        t.dst
        for t in m.outgoing(state)
        if t.event == entry.event and t.guard.evaluate(entry.params)
    )


def accepts(m: Gfsm, log: Log | Iterable[LogEntry]) -> bool:
    """Subset simulation, correct on nondeterministic machines."""
    current = {m.initial}
    for entry in log:
        current = {dst for s in current for dst in step(m, s, entry)}
        if not current:
            return False
    return bool(current & m.finals)


def is_deterministic(m: Gfsm) -> bool:
    for state in m.states:
        by_event: dict[str, list[Transition]] = defaultdict(list)
        for t in m.outgoing(state):
            by_event[t.event].append(t)
        for group in by_event.values():
            for i, a in enumerate(group):
                for b in group[i + 1 :]:
                    if a.dst != b.dst and a.guard.overlaps(b.guard):
                        return False
    return True


def canonical(m: Gfsm) -> Gfsm:
    """Renumber reachable states breadth-first; unreachable states are dropped."""
    order = {m.initial: 0}
    queue = deque([m.initial])
    while queue:
        s = queue.popleft()
        for t in m.outgoing(s):
            if t.dst not in order:
                order[t.dst] = len(order)
                queue.append(t.dst)
    return Gfsm(
        states=frozenset(order.values()),
        alphabet=m.alphabet,
        transitions=frozenset(
            Transition(order[t.src], t.event, t.guard, order[t.dst])
            for t in m.transitions
            if t.src in order
        ),
        initial=0,
        finals=frozenset(order[s] for s in m.finals if s in order),
        labels={order[s]: l for s, l in m.labels.items() if s in order},
    )


def isomorphic(a: Gfsm, b: Gfsm) -> bool:
    """Synchronized traversal of two deterministic machines from their initial states."""
    if not is_deterministic(a) or not is_deterministic(b):
        raise NondeterministicModelError("isomorphism check needs deterministic machines")
    if a.size != b.size:
        return False
    mapping = {a.initial: b.initial}
    reverse = {b.initial: a.initial}
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        t = mapping[s]
        if (s in a.finals) != (t in b.finals):
            return False
        out_a = {tr.label: tr.dst for tr in a.outgoing(s)}
        out_b = {tr.label: tr.dst for tr in b.outgoing(t)}
        if out_a.keys() != out_b.keys():
            return False
        for label, dst_a in out_a.items():
            dst_b = out_b[label]
            if mapping.get(dst_a, dst_b) != dst_b or reverse.get(dst_b, dst_a) != dst_a:
                return False
            if dst_a not in mapping:
                mapping[dst_a] = dst_b
                reverse[dst_b] = dst_a
                queue.append(dst_a)
    return len(mapping) == len(a.states)


def words(m: Gfsm, max_len: int) -> set[tuple[str, ...]]:
    """Accepted event sequences up to ``max_len``; guards are treated as satisfiable."""
    succ: dict[tuple[frozenset[int], str], frozenset[int]] = {}
    alphabet = sorted(m.alphabet)

    def move(subset: frozenset[int], event: str) -> frozenset[int]:
        key = (subset, event)
        if key not in succ:
            succ[key] = frozenset(
                t.dst for s in subset for t in m.outgoing(s) if t.event == event
            )
        return succ[key]

    accepted: set[tuple[str, ...]] = set()
    stack: list[tuple[tuple[str, ...], frozenset[int]]] = [((), frozenset({m.initial}))]
    while stack:
        word, subset = stack.pop()
        if subset & m.finals:
            accepted.add(word)
        if len(word) == max_len:
            continue
        for event in alphabet:
            nxt = move(subset, event)
            if nxt:
                stack.append((word + (event,), nxt))
    return accepted


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def to_dict(m: Gfsm) -> dict:
    return {
        "states": sorted(m.states),
        "alphabet": sorted(m.alphabet),
        "initial": m.initial,
        "finals": sorted(m.finals),
        "transitions": [
            {"src": t.src, "event": t.event, "guard": t.guard.to_dict(), "dst": t.dst}
            for t in m.sorted_transitions()
        ],
    }


def to_json(m: Gfsm) -> str:
    return json.dumps(to_dict(m), indent=2) + "\n"


def from_dict(data: Mapping) -> Gfsm:
    try:
        return Gfsm(
            states=frozenset(int(s) for s in data["states"]),
            alphabet=frozenset(data["alphabet"]),
            transitions=frozenset(
                Transition(int(t["src"]), t["event"], Guard.from_dict(t["guard"]), int(t["dst"]))
                for t in data["transitions"]
            ),
            initial=int(data["initial"]),
            finals=frozenset(int(s) for s in data["finals"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"invalid model JSON: {exc}") from exc


def from_json(text: str) -> Gfsm:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid model JSON: {exc}") from exc
    return from_dict(data)


def _gvquote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def to_dot(m: Gfsm, name: str = "gfsm") -> str:
    """GraphViz rendering; states ascending, transitions sorted."""
    lines = [f"digraph {_gvquote(name)} {{", "\trankdir=LR;", '\t"__start" [shape=point];']
    for s in sorted(m.states):
        shape = "doublecircle" if s in m.finals else "circle"
        lines.append(f"\t{s} [shape={shape}, label={_gvquote(str(s))}];")
    lines.append(f'\t"__start" -> {m.initial};')
    for t in m.sorted_transitions():
        lines.append(f"\t{t.src} -> {t.dst} [label={_gvquote(f'{t.event} [{t.guard}]')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
