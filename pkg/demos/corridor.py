"""A constrained chase on a segment: feasible sets, values, both strategies, CSV output.

python demos/corridor.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from osig import io
from osig.games import corridor_game
from osig.dual import dual_solve
from osig.primal import solve
from osig.reach import compute_masks
from osig.sim import advantage_series, monte_carlo

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

# P2 is twice as fast, so some starts are lost before the game begins.
spec = corridor_game(nodes=21, radius=0.25, p2_speed=2.0, horizon=0.6, steps=6,
                     belief_count=51, dual_bounds=((-4, 4), (-4, 4)), dual_counts=(33, 33), K=8.0)
# K must exceed the largest |ph| in the dual box plus the largest payoff
mask = compute_masks(spec)
print("feasible nodes per step", mask.feasible.sum(axis=1).tolist(), "of", spec.lattice.size)

table = solve(spec, mask)
conj = dual_solve(spec, mask)
print("extrapolated dual reads per step", conj.diagnostics["extrapolated_reads"])

x0 = np.array([-0.6, 0.6])
for q in (0.0, 0.25, 0.5, 0.75, 1.0):
    print("  p = %.2f   V(0, x0, p) = %+.4f" % (q, table.value(0, x0, [q, 1 - q])))

summary, recs = monte_carlo(spec, table, conj, x0, 500)
print({k: round(float(v), 4) for k, v in summary.items()})
print("advantage along run 0:", [None if a is None else round(a, 4) for a in advantage_series(table, recs[0])])

io.write_jsonl(out / "corridor.jsonl", recs)
io.write_csv(out / "corridor_trajectories.csv", io.trajectory_columns(recs[0]), io.trajectory_rows(recs))
rows = [[*spec.lattice.nodes[n], table.values[0, n, 25]] for n in range(spec.lattice.size)]
io.write_csv(out / "corridor_value_p05.csv", ["x0", "x1", "V"], rows)
print("wrote", sorted(p.name for p in out.iterdir()))
