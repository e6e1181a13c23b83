import numpy as np
import pytest

from osig.dual import dual_solve
from osig.games import beer_quiche_game, corridor_game
from osig.oracles.hexner import football_stateless
from osig.primal import solve

BQ_P0 = (1.0 / 3.0, 2.0 / 3.0)


@pytest.fixture(scope="session")
def bq():
    spec = beer_quiche_game()
    table = solve(spec)
    return spec, table, dual_solve(spec, table.mask)


@pytest.fixture(scope="session")
def corridor():
    spec = corridor_game()
    table = solve(spec)
    return spec, table, dual_solve(spec, table.mask)


@pytest.fixture(scope="session")
def hexner():
    """(closed-form oracle, d1, d2)."""
    return football_stateless()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
