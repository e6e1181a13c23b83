"""Two-step signaling game: the informed player's split, the responder's mix, Monte-Carlo check.

Run from anywhere:  python demos/beer_quiche.py
"""
import numpy as np

from osig import PlayerOne, PlayerTwo, dual_solve, init_dual, monte_carlo, solve
from osig.games import beer_quiche_game
from osig.oracles import BeerQuiche

spec = beer_quiche_game()
x0, p0 = np.zeros(2), [1 / 3, 2 / 3]
oracle = BeerQuiche()

# The solver minimizes, so its tables hold the negated payoffs.
table = solve(spec)
print("root value  solver %.6f   closed form %.6f" % (table.value(0, x0, p0), oracle.min_value(1 / 3)))
for q in (0.0, 0.2, 1 / 3, 0.5, 2 / 3, 0.9):
    print("  p(tough) = %.3f   V = %+.4f" % (q, table.value(0, x0, [q, 1 - q])))

# P1 splits the prior on the hull of the stage values.
dec = PlayerOne(table).decide(0, x0, p0)
for a, w, post, pr in zip(dec.actions[:, 0], dec.weights, dec.posteriors, dec.probs):
    meal = "beer" if a > 0 else "quiche"
    print("%-6s  weight %.3f  posterior tough %.3f  P(meal | tough, weak) = %.2f, %.2f"
          % (meal, w, post[0], pr[0], pr[1]))

# P2 works with a dual vector instead of the belief.
conj = dual_solve(spec, table.mask)
ph = init_dual(table, x0, p0)
print("initial dual vector", ph)
two = PlayerTwo(conj)
for state, meal in (([1.0, 0.0], "beer"), ([-1.0, 0.0], "quiche")):
    d = two.decide(1, state, ph)
    mix = {("bully" if a[0] > 0 else "defer"): round(float(w), 4) for a, w in zip(d.actions, d.weights)}
    print("after %-6s P2 plays %s" % (meal, mix))

# Empirical check: the belief is a martingale and the mean payoff sits near the value.
out, recs = monte_carlo(spec, table, conj, x0, 4000)
step = np.mean([r.beliefs[1][0] - r.beliefs[0][0] for r in recs])
print("mean belief increment %+.4f" % step)
print("mean payoff %.4f +- %.4f (value %.4f)" % (out["mean_payoff"], out["se_payoff"], 1 / 6))
