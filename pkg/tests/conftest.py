import numpy as np
import pytest

from npspace import OptBudget, build_level_table, list_entries

SEED = 11


@pytest.fixture(scope="session")
def budget():
    return OptBudget()


@pytest.fixture(scope="session")
def catalog_tables(budget):
    """Level tables to n = 4 for every catalog entry, built once."""
    return {e.name: build_level_table(e.map, 4, budget, SEED) for e in list_entries()}


@pytest.fixture(scope="session")
def catalog_entries():
    return {e.name: e for e in list_entries()}


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
