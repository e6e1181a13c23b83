import numpy as np
import pytest

from osig.games import corridor_game, random_corridor_game
from osig.oracles.brute_force import brute_force_mask
from osig.reach import backup_mask, compute_masks, flee_action, is_feasible, pursuit_action


def test_terminal_layer_is_the_constraint():
    spec = corridor_game(radius=0.25)
    mask = compute_masks(spec)
    c = spec.constraint_values(spec.lattice.nodes)
    assert np.array_equal(mask.at(spec.L), c <= 0)


def test_masks_shrink_backward():
    spec = corridor_game(radius=0.25, p2_speed=2.0)
    mask = compute_masks(spec)
    for k in range(spec.L):
        assert not np.any(mask.at(k) & ~mask.at(k + 1))


def test_faster_pursuer_captures_more():
    slow = compute_masks(corridor_game(radius=0.25, p2_speed=1.0))
    fast = compute_masks(corridor_game(radius=0.25, p2_speed=2.0))
    assert fast.at(0).sum() < slow.at(0).sum()


@pytest.mark.parametrize("seed", range(4))
def test_matches_exhaustive_search(seed):
    spec = random_corridor_game(np.random.default_rng(seed), belief_count=11)
    assert np.array_equal(compute_masks(spec).feasible, brute_force_mask(spec))


def test_conservative_is_a_subset():
    spec = corridor_game(nodes=13, radius=0.25, p1_speed=0.7, p2_speed=1.3)
    loose = compute_masks(spec)
    tight = compute_masks(spec, conservative=True)
    assert not np.any(tight.feasible & ~loose.feasible)


def test_zero_radius_keeps_everything():
    spec = corridor_game(radius=0.0)
    out = backup_mask(spec, 0, np.ones(spec.lattice.size, bool))
    # c = r - distance is zero at coincidence, which still counts as feasible
    assert out.all()


def test_mask_is_read_only():
    mask = compute_masks(corridor_game())
    with pytest.raises(ValueError):
        mask.feasible[0, 0] = False


def test_pursuit_and_flee():
    spec = corridor_game(radius=0.25, p2_speed=2.0)
    mask = compute_masks(spec)
    x = np.array([0.0, 0.4])
    assert not is_feasible(mask, 0, x)
    v = spec.actions_at(0).v[pursuit_action(spec, mask, 0, x)]
    assert v[0] < 0                      # chase toward P1
    u = spec.actions_at(0).u[flee_action(spec, mask, 0, x)]
    assert u[0] < 0                      # run away from P2
    with pytest.raises(ValueError):
        is_feasible(mask, 0, [2.0, 0.0])
