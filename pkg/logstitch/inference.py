"""
Per-component model inference: prefix tree acceptor plus k-Tails merging.

Merging is followed by a closure step that folds same-event targets until
the machine is deterministic. With guard synthesis on, a same-event fork
whose observed parameter values are disjoint at some index is kept as a
guarded split instead of being folded.
"""

from __future__ import annotations

import logging
import os
from collections import defaultdict, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from logstitch.automaton import ALWAYS_TRUE, Gfsm, Guard, Transition, canonical, is_deterministic
from logstitch.errors import ConfigError, EmptyLogError, InferenceError
from logstitch.log_model import LogSet, project

logger = logging.getLogger(__name__)

# Extra outgoing symbol marking an accepting state in k-tail signatures.
_END = "⊣"

Params = tuple[str, ...]


@dataclass(frozen=True)
class InferenceConfig:
    k: int | None = 2
    max_workers: int = 1
    guard_synthesis: bool = True

    def __post_init__(self) -> None:
        if self.k is not None and self.k < 0:
            raise ConfigError(f"k must be >= 0, got {self.k}")
        if self.max_workers < 1:
            raise ConfigError(f"max_workers must be >= 1, got {self.max_workers}")


# ---------------------------------------------------------------------------
# Prefix tree acceptor
# ---------------------------------------------------------------------------


@dataclass
class _Pta:
    """Tree with BFS-numbered nodes; edge params keep every observed vector."""

    children: list[dict[str, int]]
    params: dict[tuple[int, str], set[Params]]
    finals: set[int]

    @property
    def size(self) -> int:
        return len(self.children)


def _build_tree(logs: LogSet) -> _Pta:
    children: list[dict[str, int]] = [{}]
    params: dict[tuple[int, str], set[Params]] = defaultdict(set)
    finals: set[int] = set()
    for log in logs:
        node = 0
        for entry in log:
            nxt = children[node].get(entry.event)
            if nxt is None:
                nxt = len(children)
                children.append({})
                children[node][entry.event] = nxt
            params[(node, entry.event)].add(entry.params)
            node = nxt
        finals.add(node)

    # renumber breadth-first, children in event order
    order = {0: 0}
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for event in sorted(children[node]):
            child = children[node][event]
            order[child] = len(order)
            queue.append(child)
    renumbered: list[dict[str, int]] = [{} for _ in children]
    for node, kids in enumerate(children):
        renumbered[order[node]] = {event: order[child] for event, child in kids.items()}
    return _Pta(
        children=renumbered,
        params={(order[n], e): vals for (n, e), vals in params.items()},
        finals={order[n] for n in finals},
    )


def build_pta(logs: LogSet) -> Gfsm:
    """Tree-shaped machine accepting exactly the input event sequences."""
    if not len(logs):
        raise EmptyLogError("cannot build a prefix tree from an empty log set")
    tree = _build_tree(logs)
    return Gfsm(
        states=frozenset(range(tree.size)),
        alphabet=frozenset(e.event for log in logs for e in log),
        transitions=frozenset(
            Transition(node, event, ALWAYS_TRUE, child)
            for node, kids in enumerate(tree.children)
            for event, child in kids.items()
        ),
        initial=0,
        finals=frozenset(tree.finals),
    )


# ---------------------------------------------------------------------------
# k-Tails
# ---------------------------------------------------------------------------


def _signatures(tree: _Pta, k: int) -> list[frozenset[tuple[str, ...]]]:
    """Event paths of length <= k leaving each node; finality counts as an edge."""
    tails: list[frozenset[tuple[str, ...]]] = [frozenset({()})] * tree.size
    for _ in range(k):
        nxt = []
        for node, kids in enumerate(tree.children):
            paths = {()}
            if node in tree.finals:
                paths.add((_END,))
            for event, child in kids.items():
                paths.update((event, *tail) for tail in tails[child])
            nxt.append(frozenset(paths))
        tails = nxt
    return tails


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, items) -> None:
        roots = sorted({self.find(x) for x in items})
        for r in roots[1:]:
            self.parent[r] = roots[0]


def _split_index(targets: dict[int, set[Params]]) -> int | None:
    """Smallest parameter index whose observed values tell the targets apart."""
    vectors = [p for vals in targets.values() for p in vals]
    if not vectors:
        return None
    width = min(len(p) for p in vectors)
    for idx in range(width):
        seen: set[str] = set()
        disjoint = True
        for vals in targets.values():
            values = {p[idx] for p in vals}
            if seen & values:
                disjoint = False
                break
            seen |= values
        if disjoint:
            return idx
    return None


def _quotient_edges(
    tree: _Pta, uf: _UnionFind
) -> dict[tuple[int, str], dict[int, set[Params]]]:
    edges: dict[tuple[int, str], dict[int, set[Params]]] = defaultdict(lambda: defaultdict(set))
    for node, kids in enumerate(tree.children):
        src = uf.find(node)
        for event, child in kids.items():
            edges[(src, event)][uf.find(child)].update(tree.params[(node, event)])
    return edges


def _ktails(tree: _Pta, k: int | None, guard_synthesis: bool) -> Gfsm:
    uf = _UnionFind(tree.size)
    if k is not None:
        groups: dict[frozenset, list[int]] = defaultdict(list)
        for node, signature in enumerate(_signatures(tree, k)):
            groups[signature].append(node)
        for members in groups.values():
            if len(members) > 1:
                uf.union(members)

    # fold same-event targets until no unresolved fork is left
    while True:
        edges = _quotient_edges(tree, uf)
        folds = [
            targets.keys()
            for _, targets in sorted(edges.items())
            if len(targets) > 1 and not (guard_synthesis and _split_index(targets) is not None)
        ]
        if not folds:
            break
        for targets in folds:
            uf.union(targets)

    transitions = set()
    for (src, event), targets in edges.items():
        if len(targets) == 1:
            (dst,) = targets
            transitions.add(Transition(src, event, ALWAYS_TRUE, dst))
            continue
        idx = _split_index(targets)
        for dst, vals in targets.items():
            guard = Guard.value_set({idx: {p[idx] for p in vals}})
            transitions.add(Transition(src, event, guard, dst))
    return canonical(
        Gfsm(
            states=frozenset(uf.find(n) for n in range(tree.size)),
            alphabet=frozenset(e for _, e in edges),
            transitions=frozenset(transitions),
            initial=uf.find(0),
            finals=frozenset(uf.find(n) for n in tree.finals),
        )
    )


def infer_direct(logs: LogSet, cfg: InferenceConfig) -> Gfsm:
    """k-Tails over whole logs, regardless of how many components they mention."""
    if not len(logs):
        raise EmptyLogError("cannot infer a model from an empty log set")
    return _ktails(_build_tree(logs), cfg.k, cfg.guard_synthesis)


def infer_component(logs: LogSet, cfg: InferenceConfig) -> Gfsm:
    components = logs.components
    name = ",".join(sorted(components)) or "?"
    if len(components) != 1:
        raise InferenceError(name, "expected logs of exactly one component")
    model = infer_direct(logs, cfg)
    if not is_deterministic(model):
        raise InferenceError(name, "k-Tails produced a nondeterministic model")
    logger.debug("inferred %s: %d states, %d transitions", name, *model.size)
    return model


def _infer_one(component: str, logs: LogSet, cfg: InferenceConfig) -> Gfsm:
    try:
        return infer_component(logs, cfg)
    except InferenceError:
        raise
    except Exception as exc:
        raise InferenceError(component, str(exc)) from exc


def project_all(system_logs: LogSet) -> dict[str, LogSet]:
    return {c: project(system_logs, c) for c in sorted(system_logs.components)}


def infer_all(system_logs: LogSet, cfg: InferenceConfig) -> dict[str, Gfsm]:
    """One model per component, inferred by at most ``cfg.max_workers`` processes."""
    if not len(system_logs):
        raise EmptyLogError("cannot infer models from an empty log set")
    return infer_projections(project_all(system_logs), cfg)


def infer_projections(projections: dict[str, LogSet], cfg: InferenceConfig) -> dict[str, Gfsm]:
    components = sorted(projections)
    workers = min(cfg.max_workers, len(components), os.cpu_count() or 1)
    if workers <= 1:
        return {c: _infer_one(c, projections[c], cfg) for c in components}

    logger.info("inferring %d components with %d workers", len(components), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {c: pool.submit(_infer_one, c, projections[c], cfg) for c in components}
        return {c: futures[c].result() for c in components}

