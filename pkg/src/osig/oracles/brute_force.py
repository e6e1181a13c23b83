"""Exhaustive game-tree oracles: exact successor states, fine belief grids, no state interpolation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from ..core import GameSpec, dynamics_step

MAX_PAIRS = 16
MAX_DEPTH = 3


def _guard(spec: GameSpec):
    if spec.L > MAX_DEPTH:
        raise ValueError(f"brute force is limited to {MAX_DEPTH} steps, got {spec.L}")
    for k in range(spec.L):
        nu, nv = spec.actions_at(k).shape
        if nu * nv > MAX_PAIRS:
            raise ValueError(f"brute force needs |U||V| <= {MAX_PAIRS}, got {nu * nv} at step {k}")


def _key(k, x):
    return (k,) + tuple(np.round(np.asarray(x, float), 9))


def convex_envelope(p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Lower convex envelope of (p, v) evaluated at p, via a Qhull hull with a roof point."""
    p, v = np.asarray(p, float), np.asarray(v, float)
    if np.ptp(v) < 1e-14:
        return v.copy()
    roof = np.array([[0.5 * (p[0] + p[-1]), v.max() + 10.0 * (np.ptp(v) + 1.0)]])
    pts = np.vstack([np.column_stack([p, v]), roof])
    try:
        hull = ConvexHull(pts)
    except Exception:       # all data collinear
        return v.copy()
    # keep the vertices of facets whose outward normal points down
    low = set()
    for simplex, eq in zip(hull.simplices, hull.equations):
        if eq[1] < 0 and len(p) not in simplex:
            low.update(int(i) for i in simplex)
    low.update({0, len(p) - 1})
    idx = np.array(sorted(low))
    return np.interp(p, p[idx], v[idx])


def tree_reach(spec: GameSpec, k: int, x, memo=None) -> bool:
    """True when x is infeasible at t_k: violated now, or P2 can force violation for every u."""
    memo = {} if memo is None else memo
    key = _key(k, x)
    if key in memo:
        return memo[key]
    x = np.asarray(x, float)
    bad = bool(spec.constraint_values(x[None])[0] > 0)
    if not bad and k < spec.L:
        acts = spec.actions_at(k)
        bad = True
        for u in acts.u:
            if not any(tree_reach(spec, k + 1, dynamics_step(spec.dynamics, x, u, v, spec.tau,
                                                              spec.lattice)[0], memo)
                       for v in acts.v):
                bad = False
                break
    memo[key] = bad
    return bad


def brute_force_mask(spec: GameSpec) -> np.ndarray:
    """Infeasibility by exhaustive tree search from every lattice node: feasible (L+1, N)."""
    _guard(spec)
    memo: dict = {}
    out = np.zeros((spec.L + 1, spec.lattice.size), dtype=bool)
    for k in range(spec.L + 1):
        for n, x in enumerate(spec.lattice.nodes):
            out[k, n] = not tree_reach(spec, k, x, memo)
    return out


@dataclass
class BruteForceResult:
    p: np.ndarray                   # fine belief grid (probability of type 0)
    root: np.ndarray                # value at the root over p
    nodes: dict = field(default_factory=dict)   # (k, *x) -> value over p
    states: list = field(default_factory=list)  # every visited (k, x)
    lipschitz: float = 0.0          # largest finite-difference slope in p over feasible nodes

    def at(self, p: float) -> float:
        return float(np.interp(p, self.p, self.root))


def brute_force_value(spec: GameSpec, x0, fine: int = 1201) -> BruteForceResult:
    """Exact backup over the reachable tree with belief hulls on a `fine`-point grid."""
    _guard(spec)
    if spec.n_types != 2:
        raise NotImplementedError("brute force handles two types")
    p = np.linspace(0.0, 1.0, fine)
    P = np.column_stack([p, 1.0 - p])
    memo: dict = {}
    feas: dict = {}
    res = BruteForceResult(p, np.empty(0))

    def run(k, u, v):
        if spec.running is None:
            return 0.0
        l = np.asarray(spec.running(u[None], v[None], spec.grid.t(k)), float)
        l = l[0, 0] * np.ones(2) if l.ndim == 2 else l[0, 0]
        return spec.tau * (P @ l)

    def value(k, x):
        key = _key(k, x)
        if key in memo:
            return memo[key]
        res.states.append((k, x.copy()))
        if tree_reach(spec, k, x, feas):
            out = np.full(fine, float(spec.K))
        elif k == spec.L:
            out = P @ spec.terminal_payoffs(x[None])[0]
        else:
            acts = spec.actions_at(k)
            stage = np.full(fine, np.inf)
            for u in acts.u:
                worst = np.full(fine, -np.inf)
                for v in acts.v:
                    xn = dynamics_step(spec.dynamics, x, u, v, spec.tau, spec.lattice)[0]
                    worst = np.maximum(worst, value(k + 1, xn) + run(k, u, v))
                stage = np.minimum(stage, worst)
            out = convex_envelope(p, stage)
            res.lipschitz = max(res.lipschitz, float(np.max(np.abs(np.diff(out)) / np.diff(p))))
        memo[key] = out
        return out

    res.root = value(0, np.asarray(x0, float).reshape(-1))
    res.nodes = memo
    return res


def interpolation_slack(spec: GameSpec, result: BruteForceResult) -> float:
    """Largest distance from a visited tree state to its nearest lattice node."""
    if spec.lattice.dim == 0:
        return 0.0
    X = np.array([x for _, x in result.states])
    near = spec.lattice.nodes[spec.lattice.nearest(X)]
    return float(np.max(np.linalg.norm(X - near, axis=1)))
