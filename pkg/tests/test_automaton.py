from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logstitch.automaton import (
    ALWAYS_TRUE,
    Gfsm,
    GfsmBuilder,
    Guard,
    Transition,
    accepts,
    canonical,
    from_json,
    is_deterministic,
    isomorphic,
    step,
    to_dot,
    to_json,
    words,
)
from logstitch.determinization import powerset
from logstitch.errors import ModelError, NondeterministicModelError
from logstitch.log_model import LogEntry
from tests.helpers import brute_force_accepts, brute_force_words, entry, log, machine

# ---------------------------------------------------------------------------
# Guards
# ---------------------------------------------------------------------------


def test_guard_evaluation():
    g = Guard.value_set({0: {"ok", "done"}})
    assert g.evaluate(("ok",))
    assert not g.evaluate(("err",))
    assert not g.evaluate(())
    assert ALWAYS_TRUE.evaluate(())


def test_guard_overlap_and_join():
    ok = Guard.value_set({0: {"ok"}})
    err = Guard.value_set({0: {"err"}})
    other_index = Guard.value_set({1: {"x"}})
    assert not ok.overlaps(err)
    assert ok.overlaps(other_index)
    assert ALWAYS_TRUE.overlaps(ok)
    assert ok.join(err) == Guard.value_set({0: {"ok", "err"}})
    assert ok.join(other_index) == ALWAYS_TRUE
    assert ok.join(ALWAYS_TRUE) == ALWAYS_TRUE


def test_guard_rejects_empty_value_set():
    with pytest.raises(ModelError):
        Guard.value_set({0: set()})


def test_guard_dict_form():
    g = Guard.value_set({1: {"b", "a"}})
    assert g.to_dict() == {"kind": "value_set", "params": {"1": ["a", "b"]}}
    assert Guard.from_dict(g.to_dict()) == g
    assert str(g) == "p1 in {a,b}"
    assert str(ALWAYS_TRUE) == "true"


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


def test_structural_invariants_are_checked():
    with pytest.raises(ModelError, match="initial"):
        Gfsm(frozenset({0}), frozenset(), frozenset(), initial=1, finals=frozenset())
    with pytest.raises(ModelError, match="final"):
        Gfsm(frozenset({0}), frozenset(), frozenset(), initial=0, finals=frozenset({2}))
    with pytest.raises(ModelError, match="unknown state"):
        Gfsm(
            frozenset({0}),
            frozenset({"a"}),
            frozenset({Transition(0, "a", ALWAYS_TRUE, 5)}),
            initial=0,
            finals=frozenset(),
        )
    with pytest.raises(ModelError, match="alphabet"):
        Gfsm(
            frozenset({0}),
            frozenset(),
            frozenset({Transition(0, "a", ALWAYS_TRUE, 0)}),
            initial=0,
            finals=frozenset(),
        )


def test_builder_round_trips_a_machine_and_allocates_fresh_ids(master_model):
    b = GfsmBuilder.from_gfsm(master_model)
    assert b.build() == master_model
    fresh = b.add_state(label=("extra",))
    assert fresh == 5
    b.add_transition(3, "again", ALWAYS_TRUE, fresh)
    m = b.build()
    assert m.size == (6, 5)
    assert m.labels == {5: ("extra",)}
    assert "again" in m.alphabet


# ---------------------------------------------------------------------------
# Semantics
# ---------------------------------------------------------------------------


def test_accepts_with_guards(master_model):
    assert accepts(master_model, log("a", "Master.start", "Master.working", "Master.end(ok)"))
    assert accepts(master_model, log("b", "Master.start", "Master.working", "Master.end(err)"))
    assert not accepts(master_model, log("c", "Master.start", "Master.working", "Master.end(x)"))
    assert not accepts(master_model, log("d", "Master.start", "Master.working"))


def test_step_follows_matching_guards(master_model):
    assert step(master_model, 2, entry("Master.end(ok)")) == {3}
    assert step(master_model, 2, entry("Master.start")) == frozenset()


def test_accepts_runs_nondeterministic_machines():
    m = machine([(0, "a", 1), (0, "a", 2), (2, "b", 3)], finals={3})
    assert accepts(m, log("x", "C.a", "C.b"))
    assert not accepts(m, log("y", "C.a"))


def test_words_match_a_run_by_run_oracle(job_model):
    assert words(job_model, 6) == brute_force_words(job_model, 6)
    assert ("init", "try", "pass") in words(job_model, 3)


def test_words_on_a_nondeterministic_machine():
    m = machine([(0, "a", 1), (0, "a", 2), (1, "b", 1), (2, "c", 3)], finals={1, 3})
    assert words(m, 4) == brute_force_words(m, 4)


def test_determinism():
    assert is_deterministic(machine([(0, "a", 1), (0, "b", 2)], finals={1}))
    assert not is_deterministic(machine([(0, "a", 1), (0, "a", 2)], finals={1}))
    # disjoint guards on the same event are fine
    assert is_deterministic(
        machine([(0, "e", {0: {"x"}}, 1), (0, "e", {0: {"y"}}, 2)], finals={1})
    )
    assert not is_deterministic(
        machine([(0, "e", {0: {"x"}}, 1), (0, "e", {1: {"y"}}, 2)], finals={1})
    )
    # overlapping guards into the same state do not fork
    assert is_deterministic(machine([(0, "e", {0: {"x"}}, 1), (0, "e", 1)], finals={1}))


def test_isomorphic_ignores_numbering():
    a = machine([(0, "a", 1), (1, "b", 2), (2, "a", 1)], finals={2})
    b = machine([(5, "a", 9), (9, "b", 7), (7, "a", 9)], finals={7}, initial=5)
    assert isomorphic(a, b)


def test_isomorphic_detects_differences():
    a = machine([(0, "a", 1), (1, "b", 2)], finals={2})
    assert not isomorphic(a, machine([(0, "a", 1), (1, "b", 2)], finals={1}))
    assert not isomorphic(a, machine([(0, "a", 1), (1, "c", 2)], finals={2}))
    assert not isomorphic(a, machine([(0, "a", 1), (1, "b", 1)], finals={1}, states={2}))


def test_isomorphic_requires_determinism():
    nfa = machine([(0, "a", 1), (0, "a", 2)], finals={1})
    with pytest.raises(NondeterministicModelError):
        isomorphic(nfa, nfa)


def test_canonical_drops_unreachable_and_renumbers():
    m = machine([(7, "b", 3), (7, "a", 4), (9, "a", 9)], finals={3}, initial=7)
    c = canonical(m)
    assert c.states == {0, 1, 2}
    assert c.initial == 0
    assert Transition(0, "a", ALWAYS_TRUE, 1) in c.transitions
    assert Transition(0, "b", ALWAYS_TRUE, 2) in c.transitions
    assert c.finals == {2}


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_json_round_trip(master_model):
    assert from_json(to_json(master_model)) == master_model


def test_json_is_stable(job_model):
    assert to_json(job_model) == to_json(from_json(to_json(job_model)))


def test_invalid_model_json():
    with pytest.raises(ModelError):
        from_json("{not json")
    with pytest.raises(ModelError):
        from_json('{"states": [0], "alphabet": [], "initial": 0}')
    with pytest.raises(ModelError, match="guard kind"):
        from_json(
            '{"states": [0], "alphabet": ["a"], "initial": 0, "finals": [],'
            ' "transitions": [{"src": 0, "event": "a", "guard": {"kind": "regex"}, "dst": 0}]}'
        )


def test_dot_export(master_model):
    dot = to_dot(master_model)
    assert dot.startswith('digraph "gfsm" {')
    assert '3 [shape=doublecircle, label="3"];' in dot
    assert '0 [shape=circle, label="0"];' in dot
    assert '2 -> 3 [label="end [p0 in {ok}]"];' in dot
    assert '0 -> 1 [label="start [true]"];' in dot
    assert dot.index("2 -> 4") < dot.index("2 -> 3")


# ---------------------------------------------------------------------------
# Properties on random guarded machines
# ---------------------------------------------------------------------------

GUARDS = (
    ALWAYS_TRUE,
    Guard.value_set({0: {"x"}}),
    Guard.value_set({0: {"y"}}),
    Guard.value_set({0: {"x", "y"}}),
    Guard.value_set({1: {"x"}}),
)
PARAMS = ((), ("x",), ("y",), ("x", "x"), ("y", "x"))


@st.composite
def guarded_machines(draw, max_states: int = 8) -> Gfsm:
    n = draw(st.integers(min_value=1, max_value=max_states))
    state = st.integers(min_value=0, max_value=n - 1)
    edges = draw(
        st.lists(
            st.tuples(state, st.sampled_from("ab"), st.sampled_from(GUARDS), state),
            max_size=3 * n,
        )
    )
    transitions = frozenset(Transition(src, event, guard, dst) for src, event, guard, dst in edges)
    return Gfsm(
        states=frozenset(range(n)),
        alphabet=frozenset(t.event for t in transitions),
        transitions=transitions,
        initial=0,
        finals=frozenset(draw(st.sets(state, max_size=n))),
    )


entry_lists = st.lists(
    st.builds(
        lambda event, params: LogEntry("C", event, params),
        st.sampled_from("ab"),
        st.sampled_from(PARAMS),
    ),
    max_size=6,
)


@settings(max_examples=200, deadline=None)
@given(m=guarded_machines(), entries=entry_lists)
def test_accepts_matches_run_enumeration(m, entries):
    assert accepts(m, entries) == brute_force_accepts(m, entries)


@settings(max_examples=100, deadline=None)
@given(m=guarded_machines(), entries=entry_lists)
def test_deterministic_machines_have_at_most_one_successor(m, entries):
    for candidate in (m, powerset(m)):
        if not is_deterministic(candidate):
            continue
        for s in candidate.states:
            for e in entries:
                assert len(step(candidate, s, e)) <= 1


@settings(max_examples=100, deadline=None)
@given(m=guarded_machines())
def test_json_round_trip_of_random_machines(m):
    assert from_json(to_json(m)) == m
