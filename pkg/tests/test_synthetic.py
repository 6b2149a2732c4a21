from __future__ import annotations

import pytest

from logstitch.automaton import accepts, is_deterministic
from logstitch.errors import GeneratorError
from logstitch.log_model import logs_to_csv, partition, project
from logstitch.synthetic import generate_corpus


def test_generation_is_seeded():
    a = generate_corpus(components=2, states=5, logs=5, max_length=20, seed=42)
    b = generate_corpus(components=2, states=5, logs=5, max_length=20, seed=42)
    assert logs_to_csv(a.logs) == logs_to_csv(b.logs)
    assert a.truth_json() == b.truth_json()
    c = generate_corpus(components=2, states=5, logs=5, max_length=20, seed=43)
    assert logs_to_csv(a.logs) != logs_to_csv(c.logs)


@pytest.mark.parametrize("seed", range(10))
def test_logs_are_accepted_by_the_ground_truth(seed):
    corpus = generate_corpus(components=3, states=6, logs=10, max_length=30, seed=seed)
    for name, truth in corpus.truth.items():
        assert is_deterministic(truth)
        for l in project(corpus.logs, name):
            assert accepts(truth, l)


@pytest.mark.parametrize("seed", range(10))
def test_logs_respect_the_length_bound(seed):
    corpus = generate_corpus(components=4, states=5, logs=8, max_length=12, seed=seed)
    assert all(1 <= len(l) <= 12 for l in corpus.logs)
    assert all(l.components == {"C0", "C1", "C2", "C3"} for l in corpus.logs)


def test_event_names_are_unique_per_component():
    corpus = generate_corpus(components=3, states=6, logs=4, max_length=30, seed=1)
    alphabets = [m.alphabet for m in corpus.truth.values()]
    assert not (alphabets[0] & alphabets[1] or alphabets[1] & alphabets[2])


def test_single_component_logs_have_one_part():
    corpus = generate_corpus(components=1, states=4, logs=6, max_length=10, seed=9)
    assert all(len(partition(l)) == 1 for l in corpus.logs)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(components=0, states=3, logs=1, max_length=10),
        dict(components=2, states=1, logs=1, max_length=10),
        dict(components=2, states=3, logs=0, max_length=10),
        dict(components=3, states=3, logs=1, max_length=5),
    ],
)
def test_infeasible_parameters(kwargs):
    with pytest.raises(GeneratorError):
        generate_corpus(seed=0, **kwargs)
