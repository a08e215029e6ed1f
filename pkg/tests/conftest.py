"""Shared fixtures: the rank-3 context and the structures built from it.

The heavy objects (loop table, sigma-fixed subgroup, Doro tiling, rank-4
free loop) are session scoped so the acceptance tests and the module
tests share one build.
"""

import pytest

from triality import core, freeloop, loops


@pytest.fixture(scope="session")
def ctx3():
    return core.get_ctx(3, "z4")


@pytest.fixture(scope="session")
def table(ctx3):
    return loops.extract_m_set(ctx3)


@pytest.fixture(scope="session")
def hfix(ctx3):
    return loops.sigma_fixed_subgroup(ctx3)


@pytest.fixture(scope="session")
def doro(table, hfix):
    return loops.DoroDecomposition(table, hfix.codes)


@pytest.fixture(scope="session")
def fl4_built(table):
    return freeloop.build_free_loop(table, 4, spot_samples=1_000_000, seed=0)


@pytest.fixture(scope="session")
def fl4(fl4_built):
    return fl4_built[0]


@pytest.fixture(scope="session")
def fl4_checks(fl4_built):
    return fl4_built[1]
