"""Hexner's game without the state: Riccati gains, the reveal time, and what the solver does.

python demos/hexner.py
"""
import numpy as np

from osig import solve
from osig.games import hexner_stateless_game
from osig.oracles import critical_time, football_riccati, football_stateless
from osig.primal import stage_at
from osig.sim import monte_carlo

# d_i(t) measures how much each player's control effort matters at time t.
s1, s2 = football_riccati(1e-3)
print("d1(0) = %.4f  d2(0) = %.4f  d1(1) = %.4f  d2(1) = %.4f" % (s1.d[0], s2.d[0], s1.d[-1], s2.d[-1]))
print("critical time", critical_time(s1.d, s2.d, s1.times))

oracle, d1, d2 = football_stateless()
for t in (0.0, 0.2, 0.4, 0.6):
    print("  t = %.1f   D~ = %+.5f   V(t, 1/2) = %+.5f" % (t, oracle.D_tilde(t), oracle.value(t, 0.5)))

# Value error against the closed form shrinks roughly linearly with the step.
for L in (10, 20, 40):
    spec = hexner_stateless_game(d1, d2, steps=L)
    table = solve(spec)
    err = max(abs(table.value(k, [], [q, 1 - q]) - oracle.value(spec.grid.t(k), q))
              for k in range(L + 1) for q in np.linspace(0, 1, 11))
    print("L = %2d   max |V - V_exact| = %.5f" % (L, err))

# Before t_r the hull is not needed (advantage zero); after it P1 separates the types.
spec = hexner_stateless_game(d1, d2, steps=10)
table = solve(spec)
for k in range(spec.L):
    st = stage_at(table, k, [])
    gain = st.value[50] - table.values[k, 0, 50]
    print("step %d  t = %.1f   value of splitting at p = 1/2: %.4f" % (k, spec.grid.t(k), gain))

out, _ = monte_carlo(spec, table, None, np.zeros(0), 200)
print("P1 reveals at step %.1f, i.e. t = %.2f" % (out["reveal_delay"], out["reveal_delay"] * spec.tau))
