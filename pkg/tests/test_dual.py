import numpy as np
import pytest

from osig.core import DualLattice, NumericGuardError
from osig.dual import (check_cap, dual_solve, dual_stage_minimax, dual_terminal, init_dual,
                       read_conjugate)
from osig.games import beer_quiche_game, corridor_game, hexner_stateless_game
from osig.oracles import BeerQuiche

X0 = np.zeros(2)


def test_dual_terminal_examples():
    spec = corridor_game(radius=0.25)
    x = [-0.5, 0.5]
    g = spec.terminal_payoffs(np.array([x]))[0]
    assert dual_terminal(x, [1.0, 2.0], spec) == pytest.approx(max(1.0 - g[0], 2.0 - g[1]))
    assert dual_terminal([0.0, 0.1], [1.0, 2.0], spec) == -spec.K


def test_beer_quiche_init_dual(bq):
    _, table, _ = bq
    ph = init_dual(table, X0, [1 / 3, 2 / 3])
    assert np.allclose(ph, BeerQuiche().min_dual(1 / 3), atol=1e-12)
    assert np.allclose(ph, [-1.5, 1.0], atol=1e-12)


def test_init_dual_is_a_supporting_line(corridor):
    spec, table, _ = corridor
    x = spec.lattice.nodes[np.flatnonzero(table.mask.feasible[0])[7]]
    p0 = 0.3
    ph = init_dual(table, x, [p0, 1 - p0])
    for q in table.beliefs.p:
        assert ph @ [q, 1 - q] <= table.value(0, x, [q, 1 - q]) + 1e-9
    assert ph @ [p0, 1 - p0] == pytest.approx(table.value(0, x, [p0, 1 - p0]))


def test_init_dual_matches_closed_form(hexner):
    oracle, d1, d2 = hexner
    spec = hexner_stateless_game(d1, d2, steps=10, action_count=21, belief_count=21)
    from osig.primal import solve
    table = solve(spec)
    ph = init_dual(table, [], [0.5, 0.5])
    D0 = oracle.discrete_D_tilde(10)[0]
    assert np.allclose(ph, [D0, D0], atol=1e-12)


def test_conjugate_is_convex_and_translates(corridor):
    spec, _, conj = corridor
    dl = conj.lattice
    n = np.flatnonzero(conj.mask.feasible[0])[3]
    x = spec.lattice.nodes[n]
    W = conj.values[0, n].reshape(dl.counts)
    assert np.diff(W, 2, axis=0).min() >= -1e-9 and np.diff(W, 2, axis=1).min() >= -1e-9
    ph = np.array([0.3, -0.2])
    assert conj.value(0, x, ph + 0.5) == pytest.approx(conj.value(0, x, ph) + 0.5, abs=1e-9)


def test_fenchel_inequality(corridor):
    spec, table, conj = corridor
    rng = np.random.default_rng(3)
    feas = np.flatnonzero(table.mask.feasible[0])
    for _ in range(50):
        x = spec.lattice.nodes[rng.choice(feas)]
        q = rng.uniform()
        ph = rng.uniform(-2.5, 2.5, size=2)
        lhs = table.value(0, x, [q, 1 - q]) + conj.value(0, x, ph)
        assert lhs >= ph @ [q, 1 - q] - 1e-9


def test_complete_information_conjugate(corridor):
    spec, table, conj = corridor
    # for a function of p on [0, 1] the conjugate dominates max_i (ph_i - V(e_i))
    n = np.flatnonzero(table.mask.feasible[1])[0]
    x = spec.lattice.nodes[n]
    for ph in ([2.0, -2.0], [-2.0, 2.0]):
        edge = max(ph[0] - table.value(1, x, [1, 0]), ph[1] - table.value(1, x, [0, 1]))
        assert conj.value(1, x, ph) >= edge - 1e-9


def test_terminal_conjugate_is_exact(corridor):
    spec, table, conj = corridor
    L = spec.L
    n = np.flatnonzero(table.mask.feasible[L])[5]
    x = spec.lattice.nodes[n]
    for ph in ([0.0, 0.0], [1.0, -0.5], [-2.0, 2.5]):
        assert conj.value(L, x, ph) == pytest.approx(dual_terminal(x, ph, spec))


def test_extrapolation_beyond_the_box():
    dl = DualLattice(((-1, 1), (-1, 1)), (5, 5))
    # V*(ph) = max(ph) is exactly representable; far reads must extend it
    rows = dl.nodes.max(axis=1)[None]
    pts = np.array([[5.0, -5.0], [-4.0, 3.0], [0.5, 0.0]])
    vals, out = read_conjugate(dl, rows, pts)
    assert list(out) == [True, True, False]
    assert np.allclose(vals[0], [5.0, 3.0, 0.5])


def test_strict_stage_guard(hexner):
    oracle, d1, d2 = hexner
    spec = hexner_stateless_game(d1, d2, steps=2, action_count=5, belief_count=5,
                                 dual_bounds=((-0.1, 0.1), (-0.1, 0.1)), dual_counts=(5, 5))
    W = np.zeros((1, spec.dual_lattice().size))
    with pytest.raises(NumericGuardError):
        dual_stage_minimax(W, 0, [], [0.1, -0.1], spec)
    val, v, u = dual_stage_minimax(W, 0, [], [0.1, -0.1], spec, strict=False)
    assert np.isfinite(val)


def test_cap_must_cover_the_box():
    spec = beer_quiche_game(K=15.0)
    with pytest.raises(ValueError, match="cap"):
        check_cap(spec, spec.dual_lattice())


def test_two_types_only():
    spec = corridor_game(targets=(-0.5, 0.0, 0.5), prior=(0.2, 0.3, 0.5), belief_count=11)
    with pytest.raises(NotImplementedError):
        dual_solve(spec)
