import numpy as np
import pytest

from osig.games import corridor_game, hexner_stateless_game
from osig.oracles import BeerQuiche
from osig.primal import lookup, minimax, solve, stage_at, stage_minimax, terminal_value
from osig.reach import compute_masks

X0 = np.zeros(2)


def test_beer_quiche_root_is_piecewise_linear(bq):
    _, table, _ = bq
    oracle = BeerQuiche()
    for q in table.beliefs.p:
        assert table.value(0, X0, [q, 1 - q]) == pytest.approx(oracle.min_value(q), abs=1e-12)


def test_beer_quiche_after_beer(bq):
    spec, table, _ = bq
    # after B, P2 picks the better reply at the posterior: max of the two lines
    for q in (0.0, 0.3, 2 / 3, 1.0):
        want = max(-(2 * q - 2 * (1 - q)), -(q + 0 * (1 - q)))
        assert table.value(1, [1.0, 0.0], [q, 1 - q]) == pytest.approx(want, abs=1e-12)


def test_values_are_convex_in_the_belief(corridor):
    _, table, _ = corridor
    d2 = np.diff(table.values, n=2, axis=-1)
    feas = table.mask.feasible
    assert d2[feas].min() >= -1e-10


def test_infeasible_nodes_hold_the_cap(corridor):
    spec, table, _ = corridor
    assert np.all(table.values[~table.mask.feasible] == spec.K)


def test_constant_continuation_needs_no_hull():
    spec = corridor_game(radius=0.0, belief_count=11)
    mask = compute_masks(spec)
    V_next = np.full((spec.lattice.size, 11), 2.5)
    val, u, v = stage_minimax(V_next, 0, [0.0, 0.0], [0.4, 0.6], spec, mask.feasible[1])
    assert val == pytest.approx(2.5)


def test_minimax_on_matching_pennies():
    vals = np.array([[1.0, -1.0], [-1.0, 1.0]])[None, :, :, None]
    value, u, v, lower = minimax(vals)
    assert value[0, 0] == 1.0 and lower[0, 0] == -1.0
    assert vals[0, u[0, 0], v[0, 0], 0] == 1.0


def test_lookup_caps_dead_successors():
    spec = corridor_game(nodes=5, belief_count=3)
    feas = np.ones(spec.lattice.size, bool)
    feas[0] = False
    table = np.arange(spec.lattice.size * 3, dtype=float).reshape(-1, 3)
    out = lookup(spec.lattice, table, feas, np.array([[-1.0, -1.0], [-0.9, -1.0], [0.0, 0.0]]), 99.0)
    assert np.all(out[0] == 99.0) and np.all(out[1] == 99.0)
    assert np.allclose(out[2], table[spec.lattice.index([2, 2])])


def test_terminal_value():
    spec = corridor_game(radius=0.25)
    assert terminal_value([0.0, 0.1], [0.5, 0.5], spec) == spec.K
    want = 0.5 * ((-0.5 + 0.5) ** 2 - (0.5 + 0.5) ** 2) + 0.5 * (1.0 - 0.0)
    assert terminal_value([-0.5, 0.5], [0.5, 0.5], spec) == pytest.approx(want)


def test_complete_information_edges_match_single_type(corridor):
    spec, table, _ = corridor
    # at p in {0, 1} the hull is inactive: the edge equals the stage minimax
    for k in range(spec.L):
        for n in np.flatnonzero(table.mask.feasible[k])[:20]:
            st = stage_at(table, k, spec.lattice.nodes[n])
            assert table.values[k, n, 0] == pytest.approx(st.value[0], abs=1e-12)
            assert table.values[k, n, -1] == pytest.approx(st.value[-1], abs=1e-12)


def test_hexner_matches_semi_discrete_recursion(hexner):
    oracle, d1, d2 = hexner
    spec = hexner_stateless_game(d1, d2, steps=10, action_count=21, belief_count=21)
    table = solve(spec)
    Dk = oracle.discrete_D_tilde(10)
    for k in range(11):
        for q in (0.25, 0.5, 0.75):
            # 1 - 2q lies on the action grid, so the non-revealing move is available
            assert table.value(k, [], [q, 1 - q]) == pytest.approx(4 * q * (1 - q) * Dk[k], abs=1e-12)


def test_hexner_error_halves_with_the_step(hexner):
    oracle, d1, d2 = hexner
    errs = []
    for L in (10, 20):
        spec = hexner_stateless_game(d1, d2, steps=L, action_count=21, belief_count=21)
        t = solve(spec)
        errs.append(max(abs(t.value(k, [], [0.5, 0.5]) - oracle.value(spec.grid.t(k), 0.5))
                        for k in range(L + 1)))
    assert 1.5 <= errs[0] / errs[1] <= 3.0


def test_diagnostics_are_recorded(corridor):
    spec, table, _ = corridor
    assert len(table.diagnostics["minimax_gap"]) == spec.L
    assert len(table.diagnostics["clipped_successors"]) == spec.L


def test_table_is_read_only(bq):
    with pytest.raises(ValueError):
        bq[1].values[0, 0, 0] = 1.0
