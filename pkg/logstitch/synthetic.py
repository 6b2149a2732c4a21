"""
Seeded synthetic corpora with known per-component ground truth.

Every component gets a random deterministic machine (a spanning tree with
back edges from its leaves to the root). Logs interleave one accepted walk
per component uniformly at random.
"""

from __future__ import annotations

import json
import logging
import random
from collections import defaultdict, deque
from dataclasses import dataclass

from logstitch.automaton import ALWAYS_TRUE, Gfsm, Transition, to_dict
from logstitch.errors import GeneratorError
from logstitch.log_model import Log, LogEntry, LogSet

logger = logging.getLogger(__name__)

# chance of stopping on an accepting state when the walk could go on
_STOP_PROBABILITY = 0.3


@dataclass(frozen=True)
class SyntheticCorpus:
    logs: LogSet
    truth: dict[str, Gfsm]

    def truth_json(self) -> str:
        return json.dumps({c: to_dict(m) for c, m in sorted(self.truth.items())}, indent=2) + "\n"


def component_names(count: int) -> list[str]:
    return [f"C{i}" for i in range(count)]


def random_machine(rng: random.Random, component: str, states: int) -> Gfsm:
    """Random deterministic machine whose events are unique to ``component``."""
    prefix = component.lower()
    transitions = []
    children: dict[int, int] = defaultdict(int)
    for s in range(1, states):
        parent = rng.randrange(s)
        children[parent] += 1
        transitions.append(Transition(parent, f"{prefix}_{len(transitions)}", ALWAYS_TRUE, s))
    for leaf in range(1, states):
        if not children[leaf]:
            transitions.append(Transition(leaf, f"{prefix}_{len(transitions)}", ALWAYS_TRUE, 0))
    others = list(range(2, states))
    finals = {1} | set(rng.sample(others, rng.randint(0, len(others))))
    return Gfsm(
        states=frozenset(range(states)),
        alphabet=frozenset(t.event for t in transitions),
        transitions=frozenset(transitions),
        initial=0,
        finals=frozenset(finals),
    )


def _distance_to_final(m: Gfsm) -> dict[int, int]:
    incoming: dict[int, list[int]] = defaultdict(list)
    for t in m.transitions:
        incoming[t.dst].append(t.src)
    dist = {s: 0 for s in m.finals}
    queue = deque(sorted(m.finals))
    while queue:
        s = queue.popleft()
        for p in incoming[s]:
            if p not in dist:
                dist[p] = dist[s] + 1
                queue.append(p)
    return dist


def random_walk(rng: random.Random, m: Gfsm, budget: int) -> list[str]:
    """Events of a non-empty accepted walk of at most ``budget`` steps."""
    dist = _distance_to_final(m)
    state, events = m.initial, []
    while True:
        remaining = budget - len(events)
        options = [t for t in m.outgoing(state) if 1 + dist.get(t.dst, budget + 1) <= remaining]
        if state in m.finals and events and (not options or rng.random() < _STOP_PROBABILITY):
            return events
        t = rng.choice(options)
        events.append(t.event)
        state = t.dst


def _interleave(rng: random.Random, runs: dict[str, list[str]]) -> list[LogEntry]:
    """Uniformly random shuffle that keeps each run's internal order."""
    cursors = {c: 0 for c in runs}
    entries = []
    remaining = sum(len(r) for r in runs.values())
    while remaining:
        pick = rng.randrange(remaining)
        for c in sorted(runs):
            left = len(runs[c]) - cursors[c]
            if pick < left:
                entries.append(LogEntry(c, runs[c][cursors[c]]))
                cursors[c] += 1
                break
            pick -= left
        remaining -= 1
    return entries


def generate_corpus(
    components: int, states: int, logs: int, max_length: int, seed: int
) -> SyntheticCorpus:
    if components < 1:
        raise GeneratorError("need at least one component")
    if states < 2:
        raise GeneratorError("need at least two states per component")
    if logs < 1:
        raise GeneratorError("need at least one log")
    if max_length < 2 * components:
        raise GeneratorError(
            f"max length {max_length} is too short for {components} components "
            f"(need at least {2 * components})"
        )
    rng = random.Random(seed)
    truth = {c: random_machine(rng, c, states) for c in component_names(components)}
    budget = max_length // components
    width = len(str(logs - 1))
    generated = []
    for i in range(logs):
        runs = {c: random_walk(rng, m, budget) for c, m in truth.items()}
        generated.append(Log(f"L{i:0{width}d}", tuple(_interleave(rng, runs))))
    logger.debug("generated %d logs over %d components (seed %d)", logs, components, seed)
    return SyntheticCorpus(LogSet(tuple(generated)), truth)
