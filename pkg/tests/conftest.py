import json

import numpy as np
import pytest
from hypothesis import strategies as st


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def state_file(tmp_path):
    """Write a state document to a temp file and return its path."""
    counter = iter(range(1000))

    def write(doc):
        path = tmp_path / f"state{next(counter)}.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return write


def schmidt_vectors(max_rank=16):
    """Hypothesis strategy for sorted, normalized Schmidt vectors."""
    weights = st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=1, max_size=max_rank)

    def build(w):
        p = np.sort(np.asarray(w))[::-1]
        p = p / p.sum()
        return np.sqrt(p)

    return weights.map(build)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
