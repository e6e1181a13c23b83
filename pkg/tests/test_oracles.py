import numpy as np
import pytest

from osig.games import corridor_game
from osig.oracles import (BeerQuiche, HexnerStateless, critical_time, football_riccati,
                          riccati_integrate)
from osig.oracles.brute_force import brute_force_value, convex_envelope


def test_scalar_riccati_closed_form():
    # K' = K^2 with K(1) = 1 gives K(t) = 1 / (2 - t)
    t = np.linspace(0, 1, 201)
    sol = riccati_integrate([[0.0]], [[1.0]], [[1.0]], [[1.0]], [1.0], t)
    assert sol.K[0, 0, 0] == pytest.approx(0.5, abs=1e-10)
    assert np.allclose(sol.K[:, 0, 0], 1 / (2 - t), atol=1e-10)
    assert np.allclose(sol.Phi, 1.0)


def test_riccati_is_fourth_order():
    errs = []
    for n in (10, 20):
        t = np.linspace(0, 1, n + 1)
        sol = riccati_integrate([[0.0]], [[1.0]], [[1.0]], [[1.0]], [1.0], t)
        errs.append(abs(sol.K[0, 0, 0] - 0.5))
    assert np.log2(errs[0] / errs[1]) >= 3.5


def test_riccati_rejects_bad_weights():
    t = np.linspace(0, 1, 5)
    with pytest.raises(ValueError):
        riccati_integrate([[0.0]], [[1.0]], [[0.0]], [[1.0]], [1.0], t)
    with pytest.raises(ValueError):
        riccati_integrate([[0.0]], [[1.0]], [[1.0]], [[-1.0]], [1.0], t)


def test_critical_time_trivial_cases():
    t = np.linspace(0, 1, 101)
    assert critical_time(np.ones_like(t), np.zeros_like(t), t) == 0.0
    assert critical_time(np.zeros_like(t), np.ones_like(t), t) == 1.0


def test_football_d_is_nonnegative_and_crosses_at_04():
    s1, s2 = football_riccati(1e-3)
    assert s1.d.min() >= 0 and s2.d.min() >= 0
    assert critical_time(s1.d, s2.d, s1.times) == pytest.approx(0.4, abs=1e-3)


def test_stateless_closed_form(hexner):
    oracle, _, _ = hexner
    assert oracle.reveal_time == pytest.approx(0.4, abs=1e-6)
    assert oracle.D_tilde(0.0) < 0 and oracle.D_tilde(0.6) == 0.0
    assert oracle.value(0.0, 0.0) == 0.0 and oracle.value(0.0, 1.0) == 0.0
    D = oracle.D_tilde(0.0)
    # the dual vector supports V at p and the conjugate inverts it
    for p in (0.2, 0.5, 0.9):
        ph = oracle.init_dual(p)
        assert ph @ [p, 1 - p] == pytest.approx(oracle.value(0.0, p))
        assert oracle.conjugate(0.0, ph) == pytest.approx(ph @ [p, 1 - p] - oracle.value(0.0, p),
                                                           abs=1e-12)
    # outer branches of the conjugate are linear
    assert oracle.conjugate(0.0, [-4 * D + 1.0, 0.0]) == pytest.approx(-4 * D + 1.0)
    assert oracle.conjugate(0.0, [0.0, -4 * D + 1.0]) == pytest.approx(-4 * D + 1.0)


def test_constant_d_stateless():
    h = HexnerStateless(lambda t: 0.0 * np.asarray(t) + 1.0, lambda t: 0.0 * np.asarray(t) + 2.0,
                        np.linspace(0, 1, 11))
    assert h.D_tilde(0.0) == pytest.approx(-1.0)
    assert h.reveal_time == 1.0
    assert h.strategy(0.5, 0.25) == {"reveal": False, "u": 0.5, "v": 0.5}


def test_beer_quiche_equilibrium():
    bq = BeerQuiche()
    assert bq.value(1 / 3) == pytest.approx(-1 / 6)
    assert np.allclose(bq.dual(1 / 3), [1.5, -1.0])
    for p in (1 / 3, 0.8):
        assert bq.deviation_gain(p) <= 1e-12
    sp = bq.split(1 / 3)
    assert sp["weights"] @ sp["posteriors"] == pytest.approx(1 / 3)


def test_convex_envelope():
    p = np.linspace(0, 1, 101)
    v = np.sin(6 * p)
    env = convex_envelope(p, v)
    assert np.all(env <= v + 1e-12)
    assert np.diff(env, 2).min() >= -1e-12
    assert np.allclose(convex_envelope(p, p ** 2), p ** 2)


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_value(corridor_game(steps=4, horizon=0.8), [0.0, 0.5])


def test_brute_force_beer_quiche():
    res = brute_force_value(BeerQuiche().spec(), [0.0, 0.0])
    assert res.at(1 / 3) == pytest.approx(1 / 6, abs=1e-12)
