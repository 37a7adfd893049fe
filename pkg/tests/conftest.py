import functools

import pytest

from monodelta import load_epl
from monodelta.oracle import RandomSplSpec, generate_random_spl


@pytest.fixture(scope="session")
def epl():
    return load_epl()


@functools.lru_cache(maxsize=None)
def random_spl(seed: int):
    return generate_random_spl(RandomSplSpec(seed=seed))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
