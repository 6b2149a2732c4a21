from __future__ import annotations

import itertools

import pytest

from logstitch.automaton import ALWAYS_TRUE, Guard, accepts, is_deterministic, isomorphic, words
from logstitch import inference
from logstitch.errors import ConfigError, EmptyLogError, InferenceError
from logstitch.inference import (
    InferenceConfig,
    build_pta,
    infer_all,
    infer_component,
    infer_direct,
)
from logstitch.log_model import project
from logstitch.synthetic import generate_corpus
from tests.helpers import log, logset, machine


def test_pta_shares_prefixes():
    pta = build_pta(logset(log("1", "C.a"), log("2", "C.a", "C.b")))
    assert pta.size == (3, 2)
    assert pta.finals == {1, 2}


def test_pta_of_a_single_log_is_a_chain():
    pta = build_pta(logset(log("1", "C.a", "C.b", "C.c", "C.d")))
    assert pta.size == (5, 4)
    assert pta.finals == {4}


def test_pta_accepts_exactly_the_training_sequences(running_logs):
    masters = project(running_logs, "Master")
    pta = build_pta(masters)
    assert words(pta, 4) == {("start", "working", "end")}
    for candidate in itertools.product(["start", "working", "end"], repeat=3):
        expected = candidate == ("start", "working", "end")
        assert (candidate in words(pta, 3)) == expected


def test_k_infinity_keeps_the_prefix_tree(running_logs):
    jobs = project(running_logs, "Job")
    model = infer_component(jobs, InferenceConfig(k=None))
    assert isomorphic(model, build_pta(jobs))


def test_k_zero_collapses_to_one_state(running_logs):
    jobs = project(running_logs, "Job")
    model = infer_component(jobs, InferenceConfig(k=0))
    assert model.size == (1, 5)
    assert model.finals == {0}
    assert ("wait", "pass", "init") in words(model, 3)


def test_k2_running_example_components(running_logs):
    cfg = InferenceConfig(k=2)
    master = infer_component(project(running_logs, "Master"), cfg)
    assert isomorphic(
        master, machine([(0, "start", 1), (1, "working", 2), (2, "end", 3)], finals={3})
    )
    job = infer_component(project(running_logs, "Job"), cfg)
    # the two leaves share an empty future and are merged
    expected = machine(
        [
            (0, "init", 1),
            (1, "try", 2),
            (2, "pass", 3),
            (2, "wait", 4),
            (3, "try", 5),
            (4, "wait", 6),
            (5, "pass", 7),
            (6, "fail", 7),
        ],
        finals={7},
    )
    assert isomorphic(job, expected)


def test_k1_running_example_finds_the_retry_loop(running_logs):
    job = infer_component(project(running_logs, "Job"), InferenceConfig(k=1))
    assert is_deterministic(job)
    for l in project(running_logs, "Job"):
        assert accepts(job, l)
    assert ("init", "try", "pass", "try", "pass", "try", "pass") in words(job, 7)


def test_guard_synthesis_splits_disjoint_parameters():
    logs = logset(log("1", "C.x", "C.b(1)", "C.p"), log("2", "C.y", "C.b(2)", "C.q"))
    guarded = infer_component(logs, InferenceConfig(k=1))
    b_guards = {t.guard for t in guarded.transitions if t.event == "b"}
    assert b_guards == {Guard.value_set({0: {"1"}}), Guard.value_set({0: {"2"}})}
    assert is_deterministic(guarded)
    for l in logs:
        assert accepts(guarded, l)

    folded = infer_component(logs, InferenceConfig(k=1, guard_synthesis=False))
    assert {t.guard for t in folded.transitions} == {ALWAYS_TRUE}
    assert len([t for t in folded.transitions if t.event == "b"]) == 1


def test_overlapping_parameters_fall_back_to_merging():
    logs = logset(
        log("1", "C.x", "C.b(1)", "C.p"),
        log("2", "C.y", "C.b(1)", "C.q"),
        log("3", "C.y", "C.b(2)", "C.q"),
    )
    model = infer_component(logs, InferenceConfig(k=1))
    assert {t.guard for t in model.transitions if t.event == "b"} == {ALWAYS_TRUE}


def test_infer_component_rejects_mixed_components(running_logs):
    with pytest.raises(InferenceError, match="exactly one component"):
        infer_component(running_logs, InferenceConfig())


def test_infer_direct_accepts_system_logs(running_logs):
    model = infer_direct(running_logs, InferenceConfig(k=2))
    assert is_deterministic(model)
    for l in running_logs:
        assert accepts(model, l)


def test_infer_all_returns_one_model_per_component(running_logs):
    models = infer_all(running_logs, InferenceConfig(k=2, max_workers=2))
    assert sorted(models) == ["Job", "Master"]
    for name, model in models.items():
        for l in project(running_logs, name):
            assert accepts(model, l)


def test_single_component_system_matches_infer_component():
    logs = logset(log("1", "A.x", "A.y"), log("2", "A.x", "A.x", "A.y"))
    cfg = InferenceConfig(k=1)
    assert isomorphic(infer_all(logs, cfg)["A"], infer_component(logs, cfg))


@pytest.mark.parametrize("seed", range(20))
def test_worker_count_does_not_change_models(seed):
    corpus = generate_corpus(components=4, states=5, logs=12, max_length=40, seed=seed)
    sequential = infer_all(corpus.logs, InferenceConfig(k=2, max_workers=1))
    parallel = infer_all(corpus.logs, InferenceConfig(k=2, max_workers=4))
    assert sequential.keys() == parallel.keys()
    for name in sequential:
        assert isomorphic(sequential[name], parallel[name])


@pytest.mark.parametrize("seed", range(5))
def test_smaller_k_generalizes_more(seed):
    corpus = generate_corpus(components=1, states=4, logs=6, max_length=8, seed=seed)
    tight = infer_component(corpus.logs, InferenceConfig(k=3))
    loose = infer_component(corpus.logs, InferenceConfig(k=1))
    assert words(tight, 6) <= words(loose, 6)


def test_config_validation():
    with pytest.raises(ConfigError, match="k must"):
        InferenceConfig(k=-1)
    with pytest.raises(ConfigError, match="max_workers"):
        InferenceConfig(max_workers=0)


def test_empty_input_is_rejected():
    with pytest.raises(EmptyLogError):
        build_pta(logset())
    with pytest.raises(EmptyLogError):
        infer_direct(logset(), InferenceConfig())
    with pytest.raises(EmptyLogError):
        infer_all(logset(), InferenceConfig())


def test_workers_are_capped_by_cpu_count(monkeypatch):
    def no_pool(*args, **kwargs):
        raise AssertionError("process pool started on a single cpu")

    monkeypatch.setattr(inference.os, "cpu_count", lambda: 1)
    monkeypatch.setattr(inference, "ProcessPoolExecutor", no_pool)
    corpus = generate_corpus(components=3, states=4, logs=6, max_length=20, seed=2)
    models = infer_all(corpus.logs, InferenceConfig(k=2, max_workers=8))
    assert sorted(models) == sorted(corpus.logs.components)

