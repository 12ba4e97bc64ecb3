from pathlib import Path

import numpy as np
import pytest

from energynet import load
from energynet.models import random_connected_network

DATA = Path(__file__).parent / "data"
CORPUS = ["triangle", "tree", "path", "strip", "mesh"]


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def corpus():
    return {name: load(DATA / f"{name}.json") for name in CORPUS}


def random_corpus(count=50, max_vertices=50, seed=42):
    """Random connected graphs, about a fifth of them trees."""
    rng = np.random.default_rng(seed)
    nets = []
    for k in range(count):
        n = int(rng.integers(3, max_vertices + 1))
        nets.append(random_connected_network(n, rng, extra=float(rng.uniform(0.05, 0.6)),
                                             tree=(k % 5 == 0)))
    return nets


@pytest.fixture(scope="session")
def random_nets():
    return random_corpus(count=12, max_vertices=30, seed=7)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
