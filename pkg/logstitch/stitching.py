"""
Stitch component models into a system model along the system logs.

Every system log is partitioned into single-component runs. Each run is
replayed on its component model from where that component last stopped,
and the traversed part (a slice) is appended to the log's accumulator.
The per-log models are then united under one initial state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from logstitch.automaton import Gfsm, GfsmBuilder, Transition, canonical, is_deterministic
from logstitch.errors import (
    EmptyLogError,
    NondeterministicModelError,
    SliceError,
    StitchError,
)
from logstitch.log_model import Log, LogSet, partition

logger = logging.getLogger(__name__)


@dataclass
class StitchContext:
    """Where the next slice of each component starts."""

    slice_start: dict[str, int] = field(default_factory=dict)

    @classmethod
    def initial(cls, models: Mapping[str, Gfsm]) -> StitchContext:
        return cls({name: m.initial for name, m in models.items()})


@dataclass(frozen=True)
class SlicedModel:
    model: Gfsm
    origin: str

    def __post_init__(self) -> None:
        if len(self.model.finals) != 1:
            raise StitchError(f"slice of {self.origin!r} must have exactly one final state")

    @property
    def final(self) -> int:
        (state,) = self.model.finals
        return state


def slice_model(m_c: Gfsm, ctx: StitchContext, l_c: Log) -> SlicedModel:
    """Replay ``l_c`` on ``m_c`` from the component's slice start."""
    if not l_c.entries:
        raise EmptyLogError(f"cannot slice with empty log {l_c.log_id!r}")
    if len(l_c.components) != 1:
        raise StitchError(f"slice log {l_c.log_id!r} spans several components")
    component = l_c.entries[0].component
    start = ctx.slice_start.get(component, m_c.initial)

    state = start
    visited = {state}
    traversed: set[Transition] = set()
    for entry in l_c:
        enabled = [
            t
            for t in m_c.outgoing(state)
            if t.event == entry.event and t.guard.evaluate(entry.params)
        ]
        if not enabled:
            raise SliceError(component, state, entry)
        if len({t.dst for t in enabled}) > 1:
            raise NondeterministicModelError(
                f"component {component!r} is nondeterministic at state {state} on {entry}"
            )
        traversed.update(enabled)
        state = enabled[0].dst
        visited.add(state)

    ctx.slice_start[component] = state
    model = Gfsm(
        states=frozenset(visited),
        alphabet=frozenset(t.event for t in traversed),
        transitions=frozenset(traversed),
        initial=start,
        finals=frozenset({state}),
        labels={s: (f"{component}:{s}",) for s in visited},
    )
    return SlicedModel(model, component)


def _append_into(builder: GfsmBuilder, final: int | None, sl: SlicedModel) -> int:
    """Copy ``sl`` into ``builder`` gluing its initial state onto ``final``.

    Returns the id of the copied slice's final state.
    """
    m = sl.model
    mapping: dict[int, int] = {}
    for s in sorted(m.states):
        label = m.labels.get(s, ())
        if s == m.initial and final is not None:
            mapping[s] = final
            builder.labels[final] = builder.labels.get(final, ()) + label
        else:
            mapping[s] = builder.add_state(builder.next_id, label)
    if final is None:
        builder.initial = mapping[m.initial]
    for t in m.transitions:
        builder.add_transition(mapping[t.src], t.event, t.guard, mapping[t.dst])
    builder.alphabet |= m.alphabet
    return mapping[sl.final]


def append(m_a: Gfsm | None, m_sl: SlicedModel) -> Gfsm:
    """Glue the sole final state of ``m_a`` onto the initial state of ``m_sl``."""
    if m_a is None:
        return m_sl.model
    if len(m_a.finals) != 1:
        raise StitchError(f"accumulator must have exactly one final state, has {len(m_a.finals)}")
    (final,) = m_a.finals
    builder = GfsmBuilder.from_gfsm(m_a)
    builder.finals = {_append_into(builder, final, m_sl)}
    return builder.build()


def union(models: Sequence[Gfsm]) -> Gfsm:
    """Disjoint union with every initial state collapsed into one."""
    if not models:
        raise StitchError("cannot unite an empty set of models")
    if len(models) == 1:
        return models[0]
    builder = GfsmBuilder()
    root = builder.add_state(0)
    builder.initial = root
    for m in models:
        mapping: dict[int, int] = {}
        for s in sorted(m.states):
            label = m.labels.get(s, ())
            if s == m.initial:
                mapping[s] = root
                builder.labels[root] = builder.labels.get(root, ()) + label
            else:
                mapping[s] = builder.add_state(builder.next_id, label)
        for t in m.transitions:
            builder.add_transition(mapping[t.src], t.event, t.guard, mapping[t.dst])
        builder.alphabet |= m.alphabet
        builder.finals |= {mapping[s] for s in m.finals}
    return builder.build()


SliceCache = dict[tuple[str, int, tuple], SlicedModel]


def stitch_log(
    log: Log, component_models: Mapping[str, Gfsm], cache: SliceCache | None = None
) -> Gfsm:
    """Per-execution model: the appended slices of one system log.

    ``cache`` maps (component, start state, part entries) to slices already
    computed for earlier logs.
    """
    ctx = StitchContext.initial(component_models)
    builder = GfsmBuilder()
    final: int | None = None
    for component, part in partition(log):
        key = (component, ctx.slice_start[component], part.keys)
        sl = cache.get(key) if cache is not None else None
        if sl is None:
            sl = slice_model(component_models[component], ctx, part)
            if cache is not None:
                cache[key] = sl
        else:
            ctx.slice_start[component] = sl.final
        final = _append_into(builder, final, sl)
    builder.finals = {final}
    return builder.build()


def stitch(system_logs: LogSet, component_models: Mapping[str, Gfsm]) -> Gfsm:
    """Union of the per-log models; the result may be nondeterministic.

    A per-log model depends only on the log's entry sequence, so repeated
    sequences are stitched once.
    """
    if not len(system_logs):
        raise StitchError("no logs to stitch")
    missing = sorted(system_logs.components - component_models.keys())
    if missing:
        raise StitchError(f"no component model for: {', '.join(missing)}")
    for name in sorted(component_models):
        if not is_deterministic(component_models[name]):
            raise NondeterministicModelError(f"component model {name!r} is nondeterministic")

    unique = system_logs.distinct()
    cache: SliceCache = {}
    per_log = [stitch_log(log, component_models, cache) for log in unique]
    model = canonical(union(per_log))
    logger.debug(
        "stitched %d logs (%d distinct) into %d states",
        len(system_logs), len(unique), len(model.states),
    )
    return model
