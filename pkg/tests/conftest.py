import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fracsr.fileio import load_image

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

DATA = os.path.join(os.path.dirname(__file__), "data")
CORPUS_DIR = os.path.join(DATA, "corpus")
CORPUS_NAMES = ("camera", "astronaut", "coffee", "chelsea", "coins")


def corpus_path(name):
    return os.path.join(CORPUS_DIR, f"{name}.png")


@pytest.fixture(scope="session")
def corpus():
    return {n: load_image(corpus_path(n)) for n in CORPUS_NAMES}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
