import time

import pytest

from pulseforge import search


@pytest.fixture(scope="session")
def qubit_dictionary():
    return search.build_dictionary(2)


@pytest.fixture(scope="session")
def qutrit_pruning():
    """(dictionary, wall seconds) so the timing bound is checked once."""
    t0 = time.perf_counter()
    d = search.build_dictionary(3)
    return d, time.perf_counter() - t0


@pytest.fixture(scope="session")
def qutrit_dictionary(qutrit_pruning):
    return qutrit_pruning[0]
