import numpy as np
import pytest

from osig.games import hexner_stateless_game
from osig.primal import solve
from osig.sim import (TrajectoryRecord, advantage, advantage_series, monte_carlo, realized_payoff,
                      reveal_delay, reveal_step, rollout)

X0 = np.zeros(2)


def test_record_roundtrip(bq):
    spec, table, conj = bq
    rec = rollout(spec, table, conj, X0, seed=4)
    back = TrajectoryRecord.from_json(rec.to_json())
    assert back == rec
    assert back.L == spec.L and len(back.states) == spec.L + 1


def test_payoff_recomputes(corridor):
    spec, table, conj = corridor
    for s in range(10):
        rec = rollout(spec, table, conj, [-0.6, 0.6], seed=s)
        assert realized_payoff(spec, rec) == pytest.approx(rec.payoff, abs=1e-9)


def test_same_seed_same_game(corridor):
    spec, table, conj = corridor
    a = rollout(spec, table, conj, [-0.6, 0.6], seed=11)
    b = rollout(spec, table, conj, [-0.6, 0.6], seed=11)
    assert a.to_json() == b.to_json()


def test_fixed_type(bq):
    spec, table, conj = bq
    recs = [rollout(spec, table, conj, X0, type_source=0, seed=s) for s in range(20)]
    assert {r.type for r in recs} == {0}
    assert all(r.p1_actions[0] == [1.0] for r in recs)


def test_beer_quiche_beliefs_step_as_the_split(bq):
    spec, table, conj = bq
    for s in range(20):
        rec = rollout(spec, table, conj, X0, seed=s)
        assert rec.beliefs[1][0] in (pytest.approx(0.0), pytest.approx(2 / 3))


def test_hexner_reveals_at_the_critical_step(hexner):
    oracle, d1, d2 = hexner
    spec = hexner_stateless_game(d1, d2, steps=10, action_count=21, belief_count=21)
    table = solve(spec)
    recs = [rollout(spec, table, None, [], seed=s) for s in range(8)]
    assert reveal_delay(recs) == 4.0
    assert int(round(oracle.reveal_time / spec.tau)) == 4
    for r in recs:
        assert r.beliefs[4] == pytest.approx([0.5, 0.5])
        assert max(r.beliefs[5]) == pytest.approx(1.0)


def test_reveal_step_without_revelation():
    rec = TrajectoryRecord(times=[0, 1, 2], states=[[0], [0], [0]], p1_actions=[[0], [0]],
                           p2_actions=[[0], [0]], beliefs=[[0.5, 0.5]] * 3, duals=[None] * 3,
                           flags=[[], []], type=0, payoff=0.0)
    assert reveal_step(rec) == 2


def test_advantage(bq):
    spec, table, _ = bq
    # without a split the best pooled meal is worth 1/3 to the minimizer; the hull gives 1/6
    assert advantage(table, 0, X0, [1 / 3, 2 / 3]) == pytest.approx(1 / 6, abs=1e-12)
    assert advantage(table, 0, X0, [1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)
    assert advantage(table, 0, X0, [0.0, 1.0]) == pytest.approx(0.0, abs=1e-12)


def test_advantage_is_nonnegative(corridor):
    spec, table, conj = corridor
    rec = rollout(spec, table, conj, [-0.6, 0.6], seed=2)
    series = advantage_series(table, rec)
    assert len(series) == spec.L
    assert all(a is None or a >= -1e-12 for a in series)


def test_monte_carlo_summary(bq):
    spec, table, conj = bq
    out, recs = monte_carlo(spec, table, conj, X0, 400)
    assert out["n"] == 400 and len(recs) == 400
    assert out["violations"] == 0
    assert out["se_payoff"] == pytest.approx(out["std_payoff"] / 20)
    assert abs(out["mean_payoff"] - 1 / 6) <= 4 * out["se_payoff"]
    with pytest.raises(ValueError):
        monte_carlo(spec, table, conj, X0, 3, seeds=[1, 2])
