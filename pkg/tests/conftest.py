from __future__ import annotations

from pathlib import Path

import pytest

from logstitch.log_model import parse_logs
from tests.helpers import machine

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def running_example_csv() -> Path:
    return FIXTURES / "running_example.csv"


@pytest.fixture
def running_logs(running_example_csv):
    with open(running_example_csv, newline="", encoding="utf-8") as f:
        return parse_logs(f)


@pytest.fixture
def master_model():
    """Master: start, working, then end guarded by its status."""
    return machine(
        [
            (0, "start", 1),
            (1, "working", 2),
            (2, "end", {0: {"ok"}}, 3),
            (2, "end", {0: {"err"}}, 4),
        ],
        finals={3, 4},
    )


@pytest.fixture
def job_model():
    """Job: try/pass loop, waits that may repeat, then fail."""
    return machine(
        [
            (0, "init", 1),
            (1, "try", 2),
            (2, "pass", 1),
            (2, "wait", 3),
            (3, "wait", 3),
            (3, "fail", 4),
        ],
        finals={1, 4},
    )


@pytest.fixture
def component_models(master_model, job_model):
    return {"Master": master_model, "Job": job_model}


@pytest.fixture
def system_model():
    """The ideal system model of the running example."""
    return machine(
        [
            (0, "start", 1),
            (1, "init", 2),
            (2, "working", 3),
            (3, "try", 4),
            (4, "pass", 3),
            (4, "wait", 5),
            (5, "wait", 5),
            (5, "fail", 6),
            (6, "end", {0: {"err"}}, 7),
            (3, "end", {0: {"ok"}}, 8),
        ],
        finals={7, 8},
    )
