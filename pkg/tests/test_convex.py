import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osig.convex import lower_hull_1d, lower_hull_2d, second_differences, split_at, vex_error_bound

values = st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=40)


@settings(max_examples=80, deadline=None)
@given(values)
def test_hull_1d_is_convex_minorant(v):
    v = np.array(v)
    x = np.linspace(0, 1, len(v))
    h = lower_hull_1d(x, v)
    nodes = h.nodes()
    assert np.all(nodes <= v + 1e-12)
    assert np.all(second_differences(nodes) >= -1e-9)
    assert np.allclose(nodes[h.index], v[h.index])
    assert h.index[0] == 0 and h.index[-1] == len(v) - 1


@settings(max_examples=80, deadline=None)
@given(values, st.floats(0, 1))
def test_split_is_a_martingale(v, q):
    x = np.linspace(0, 1, len(v))
    h = lower_hull_1d(x, np.array(v))
    sp = h.split(q)
    assert sp.weights.sum() == pytest.approx(1.0)
    assert np.all(sp.weights > 0)
    assert sp.weights @ sp.points.reshape(-1) == pytest.approx(q, abs=1e-12)
    assert sp.value() == pytest.approx(h(q), abs=1e-9)
    assert sp.m <= 2


def test_hull_1d_examples():
    h = lower_hull_1d([0, 0.5, 1], [0, 1, 0])       # concave data: chord only
    assert list(h.index) == [0, 2]
    h = lower_hull_1d([0, 0.5, 1], [1, 0, 1])
    assert list(h.index) == [0, 1, 2]
    sp = split_at(h, 0.5)
    assert sp.m == 1 and sp.weights[0] == 1.0


def test_hull_1d_rejects_bad_coords():
    with pytest.raises(ValueError):
        lower_hull_1d([0, 0, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        lower_hull_1d([0, 1, 2], [1, np.inf, 3])


def test_hull_1d_collinear_is_single_segment():
    x = np.linspace(0, 1, 11)
    h = lower_hull_1d(x, 3 * x - 1)
    assert list(h.index) == [0, 10]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_hull_2d_properties(seed):
    rng = np.random.default_rng(seed)
    a0, a1 = np.linspace(-1, 1, 6), np.linspace(-1, 1, 5)
    Z = rng.normal(size=(6, 5))
    h = lower_hull_2d(a0, a1, Z)
    nodes = h.nodes().reshape(6, 5)
    assert np.all(nodes <= Z + 1e-10)
    q = rng.uniform(-1, 1, size=2)
    sp = h.split(q)
    assert sp.weights.sum() == pytest.approx(1.0)
    assert sp.m <= 3
    assert np.allclose(sp.weights @ sp.points, q)
    assert sp.value() == pytest.approx(h(q), abs=1e-9)


def test_hull_2d_on_convex_data_is_exact():
    a = np.linspace(-1, 1, 7)
    X, Y = np.meshgrid(a, a, indexing="ij")
    Z = X ** 2 + 0.5 * Y ** 2
    h = lower_hull_2d(a, a, Z)
    assert np.allclose(h.nodes().reshape(7, 7), Z)


def test_vex_error_bound():
    assert vex_error_bound(0.01, 3.0) == pytest.approx(0.06)
    with pytest.raises(ValueError):
        vex_error_bound(0.0, 1.0)


def test_hull_2d_saddle_and_plane():
    a = np.array([-1.0, 0.0, 1.0])
    X, Y = np.meshgrid(a, a, indexing="ij")
    h = lower_hull_2d(a, a, -X * Y)
    assert h((0.0, 0.0)) == pytest.approx(-1.0)
    sp = h.split((0.0, 0.0))
    assert sp.value() == pytest.approx(-1.0)
    plane = 0.3 * X - 2.0 * Y + 0.7
    assert np.allclose(lower_hull_2d(a, a, plane).nodes().reshape(3, 3), plane)
    # deterministic tie-break on a shared edge
    assert np.array_equal(h.split((0.0, 0.0)).points, sp.points)
