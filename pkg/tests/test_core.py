import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osig.core import (ActionSet, Belief, BeliefLattice, DoubleIntegrator, DualLattice, GameSpec,
                       SingleIntegrator, StateLattice, Static, TimeGrid, as_belief, belief_project,
                       dynamics_step)


def test_belief_validation():
    assert as_belief([0.25, 0.75])[1] == 0.75
    with pytest.raises(ValueError):
        Belief(np.array([0.6, 0.6]))
    with pytest.raises(ValueError):
        Belief(np.array([-0.1, 1.1]))
    with pytest.raises(ValueError):
        belief_project([np.nan, 1.0])
    assert np.allclose(belief_project([-1e-15, 2.0]).weights, [0.0, 1.0])


def test_time_grid():
    g = TimeGrid(1.0, 10)
    assert g.tau == pytest.approx(0.1)
    assert g.times[-1] == 1.0 and len(g.times) == 11
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)


def test_lattice_nodes_row_major():
    lat = StateLattice([0, 0], [1, 2], [2, 3])
    assert lat.size == 6
    assert np.allclose(lat.nodes[:3], [[0, 0], [0, 1], [0, 2]])
    assert lat.index([1, 2]) == 5
    assert np.all(lat.multi_index(5) == [1, 2])


def test_lattice_rejects_outside():
    lat = StateLattice([-1], [1], [5])
    with pytest.raises(ValueError):
        lat.nearest([[1.5]])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=2, max_size=2))
def test_cell_weights_reproduce_affine(x):
    lat = StateLattice([-1, -1], [1, 1], [5, 7])
    f = lat.nodes @ np.array([0.3, -1.7]) + 0.2
    idx, w = lat.cell(np.array(x))
    assert w.sum() == pytest.approx(1.0)
    assert np.all(w >= 0)
    # fractions within 1e-10 of a node snap to it, which bounds the error
    assert w @ f[idx] == pytest.approx(np.dot(x, [0.3, -1.7]) + 0.2, abs=1e-9)


def test_cell_on_node_is_exact():
    lat = StateLattice([-1], [1], [11])
    idx, w = lat.cell(np.array([0.2]))
    assert w.max() == 1.0
    assert np.allclose(lat.nodes[idx[np.argmax(w)]], 0.2)


def test_dynamics_step_clips_at_boundary():
    lat = StateLattice([-1, -1], [1, 1], [11, 11])
    x, flag = dynamics_step(SingleIntegrator(1, 1), [0.9, 0.0], [1.0], [0.0], 0.2, lat)
    assert np.allclose(x, [1.0, 0.0]) and bool(flag)
    x, flag = dynamics_step(SingleIntegrator(1, 1), [0.0, 0.0], [1.0], [0.0], 0.2, lat)
    assert np.allclose(x, [0.2, 0.0]) and not flag


def test_dynamics_step_rejects_bad_input():
    with pytest.raises(ValueError):
        dynamics_step(SingleIntegrator(), [np.nan, 0.0], [1.0], [0.0], 0.1)
    with pytest.raises(ValueError):
        dynamics_step(SingleIntegrator(), [0.0, 0.0], [1.0], [0.0], 0.0)


def test_double_integrator_layout():
    f = DoubleIntegrator(1, 1)
    r = f.rate(np.array([0.0, 2.0, 1.0, -1.0]), np.array([3.0]), np.array([4.0]))
    assert np.allclose(r, [2.0, 3.0, -1.0, 4.0])


def test_static_dynamics_broadcast():
    r = Static().rate(np.zeros((1, 1, 1, 0)), np.zeros((1, 3, 1, 1)), np.zeros((1, 1, 4, 1)))
    assert r.shape == (1, 3, 4, 0)


def test_action_bounds_checked():
    with pytest.raises(ValueError):
        ActionSet(u=[[2.0]], v=[[0.0]], u_bounds=(-1, 1))


def test_gamespec_cap_must_dominate():
    lat = StateLattice([-1, -1], [1, 1], [3, 3])
    kw = dict(dynamics=SingleIntegrator(), lattice=lat, actions=ActionSet([[0.0]], [[0.0]]),
              n_types=2, terminal=lambda X: np.full((len(X), 2), 3.0), grid=TimeGrid(1, 1))
    with pytest.raises(ValueError, match="cap"):
        GameSpec(K=3.0, **kw)
    assert GameSpec(K=3.5, **kw).payoff_bound() == 3.0


def test_belief_lattice():
    bl = BeliefLattice(101)
    assert bl.spacing == pytest.approx(0.01)
    assert bl.node_of(0.37) == 37 and bl.node_of(0.375) is None


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20))
def test_dual_translation_is_along_diagonal(a, b):
    dl = DualLattice(((-2, 2), (-2, 2)), (9, 9))
    moved, c, ok = dl.translate_inside(np.array([[a, b]]))
    if ok[0]:
        assert np.allclose(moved[0] + c[0], [a, b])
        assert np.all(moved >= -2 - 1e-12) and np.all(moved <= 2 + 1e-12)
    else:
        assert abs(a - b) > 4 - 1e-9
