"""Primal value tables: backward induction with convexification in the belief."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .convex import lower_hull_1d
from .core import BeliefLattice, GameSpec, StateLattice, as_belief
from .reach import FeasibilityMask, compute_masks


@dataclass(frozen=True, eq=False)
class ValueTable:
    """values[k, n, j]: value at step k, state node n, belief node j."""

    spec: GameSpec
    values: np.ndarray
    mask: FeasibilityMask
    beliefs: BeliefLattice
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def K(self) -> float:
        return self.spec.K

    def value(self, k: int, x, p) -> float:
        """Value at any state in the box and any belief (linear in p between nodes)."""
        x = np.asarray(x, float).reshape(1, -1)
        row = lookup(self.spec.lattice, self.values[k], self.mask.feasible[k], x, self.K)[0]
        return float(np.interp(as_belief(p)[0], self.beliefs.p, row))


def lookup(lattice: StateLattice, table: np.ndarray, feasible: np.ndarray, X, cap: float):
    """Multilinear read of table rows at states X.

    Successors whose nearest node is infeasible read `cap`; otherwise only the
    feasible corners of the cell are blended, with renormalized weights.
    """
    X = np.asarray(X, float)
    idx, w = lattice.cell(X)
    w = w * feasible[idx]
    s = w.sum(axis=-1, keepdims=True)
    w = np.divide(w, s, out=np.zeros_like(w), where=s > 0)
    out = np.einsum("...c,...cp->...p", w, table[idx])
    bad = ~feasible[lattice.nearest(X)]
    out[bad] = cap
    return out


def terminal_value(x, p, spec: GameSpec) -> float:
    """sum_i p_i g_i(x) on the feasible set, K otherwise."""
    x = np.asarray(x, float).reshape(1, -1)
    if spec.constraint_values(x)[0] > 0:
        return float(spec.K)
    return float(spec.terminal_payoffs(x)[0] @ as_belief(p).weights)


def terminal_table(spec: GameSpec, beliefs: BeliefLattice, feasible: np.ndarray) -> np.ndarray:
    g = spec.terminal_payoffs(spec.lattice.nodes)          # (N, I)
    V = g @ beliefs.beliefs.T                               # (N, P)
    V[~feasible] = spec.K
    return V


def stage_payoffs(spec: GameSpec, k: int, V_next, feasible_next, X, beliefs: np.ndarray):
    """Continuation plus running payoff for all action pairs: (M, nu, nv, P), clip flags."""
    Xn, clipped = spec.successors(k, np.asarray(X, float))
    vals = lookup(spec.lattice, V_next, feasible_next, Xn, spec.K)
    run = spec.stage_running(k, beliefs)
    if run is not None:
        vals = vals + run[None]
    return vals, clipped


def minimax(vals: np.ndarray):
    """min over u of max over v along axes 1 and 2 of (M, nu, nv, P).

    Returns value, argmin u, P2's reply v to that u, and the maximin value.
    """
    worst = vals.max(axis=2)                    # (M, nu, P)
    u = np.argmin(worst, axis=1)                # (M, P)
    value = np.take_along_axis(worst, u[:, None, :], axis=1)[:, 0, :]
    at_u = np.take_along_axis(vals, u[:, None, None, :], axis=1)[:, 0]   # (M, nv, P)
    v = np.argmax(at_u, axis=1)
    lower = vals.min(axis=1).max(axis=1)
    return value, u, v, lower


@dataclass(frozen=True, eq=False)
class Stage:
    """Stage game at one (k, x) over the whole belief lattice."""

    value: np.ndarray   # (P,)
    u: np.ndarray       # (P,) action indices
    v: np.ndarray       # (P,)
    gap: float


def stage_at(table: ValueTable, k: int, x) -> Stage:
    spec = table.spec
    x = np.asarray(x, float).reshape(1, -1)
    vals, _ = stage_payoffs(spec, k, table.values[k + 1], table.mask.feasible[k + 1], x,
                            table.beliefs.beliefs)
    value, u, v, lower = minimax(vals)
    return Stage(value[0], u[0], v[0], float(np.max(value[0] - lower[0])))


def stage_minimax(V_next: np.ndarray, k: int, x, p, spec: GameSpec,
                  feasible_next: Optional[np.ndarray] = None,
                  beliefs: Optional[BeliefLattice] = None):
    """(value, u*, v*) of min_u max_v [V_next(x', p) + tau l(u, v)] at one belief.

    V_next is the (N, P) table of step k+1; off-lattice beliefs read it linearly in p.
    """
    beliefs = beliefs or spec.belief_lattice()
    if feasible_next is None:
        feasible_next = np.ones(spec.lattice.size, dtype=bool)
    p = as_belief(p)
    x = np.asarray(x, float).reshape(1, -1)
    Xn, _ = spec.successors(k, x)
    rows = lookup(spec.lattice, V_next, feasible_next, Xn, spec.K)[0]    # (nu, nv, P)
    vals = np.apply_along_axis(lambda r: np.interp(p[0], beliefs.p, r), -1, rows)
    sh = spec.shift_vectors(k)
    if sh is not None:
        vals = vals + sh @ p.weights
    worst = vals.max(axis=1)
    u = int(np.argmin(worst))
    v = int(np.argmax(vals[u]))
    acts = spec.actions_at(k)
    return float(worst[u]), acts.u[u], acts.v[v]


def backup_step(V_next: np.ndarray, k: int, spec: GameSpec, mask: FeasibilityMask,
                beliefs: Optional[BeliefLattice] = None, diagnostics: Optional[dict] = None):
    """Table at step k from the finalized table at step k+1."""
    beliefs = beliefs or spec.belief_lattice()
    feasible = mask.feasible[k]
    nodes = spec.lattice.nodes
    out = np.full((spec.lattice.size, beliefs.count), float(spec.K))
    live = np.flatnonzero(feasible)
    if live.size:
        vals, clipped = stage_payoffs(spec, k, V_next, mask.feasible[k + 1], nodes[live],
                                      beliefs.beliefs)
        value, _, _, lower = minimax(vals)
        for r, n in enumerate(live):
            out[n] = lower_hull_1d(beliefs.p, value[r]).nodes()
        if diagnostics is not None:
            diagnostics.setdefault("clipped_successors", []).append(int(clipped.sum()))
            diagnostics.setdefault("minimax_gap", []).append(float(np.max(value - lower)))
    return out


def solve(spec: GameSpec, mask: Optional[FeasibilityMask] = None) -> ValueTable:
    """Backward induction from the terminal payoffs to t_0."""
    mask = mask or compute_masks(spec)
    beliefs = spec.belief_lattice()
    L = spec.L
    V = np.empty((L + 1, spec.lattice.size, beliefs.count))
    V[L] = terminal_table(spec, beliefs, mask.feasible[L])
    diag: dict = {}
    for k in range(L - 1, -1, -1):
        V[k] = backup_step(V[k + 1], k, spec, mask, beliefs, diag)
    for key in ("clipped_successors", "minimax_gap"):
        if key in diag:
            diag[key] = diag[key][::-1]
    return ValueTable(spec, V, mask, beliefs, diag)
