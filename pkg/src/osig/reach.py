"""Backward reachable (infeasible) sets on the state lattice."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GameSpec, StateLattice


@dataclass(frozen=True, eq=False)
class FeasibilityMask:
    """feasible[k, n] is True when node n lies in the feasible set at t_k."""

    feasible: np.ndarray
    lattice: StateLattice

    def __post_init__(self):
        f = np.array(self.feasible, dtype=bool)
        f.setflags(write=False)
        object.__setattr__(self, "feasible", f)

    @property
    def L(self) -> int:
        return self.feasible.shape[0] - 1

    def at(self, k: int) -> np.ndarray:
        return self.feasible[k]


def terminal_mask(lattice: StateLattice, c) -> np.ndarray:
    """Feasible terminal nodes: c(x) <= 0."""
    return np.asarray(c(lattice.nodes), dtype=float).reshape(-1) <= 0.0


def successor_infeasible(spec: GameSpec, k: int, X, feasible_next, conservative: bool = False):
    """Infeasibility of every successor of the states X under step-k actions.

    Returns (bad, clipped), both of shape (M, nu, nv).
    """
    Xn, clipped = spec.successors(k, X)
    if conservative:
        idx, _ = spec.lattice.cell(Xn)
        bad = ~np.all(feasible_next[idx], axis=-1)
    else:
        bad = ~feasible_next[spec.lattice.nearest(Xn)]
    return bad, clipped


def backup_mask(spec: GameSpec, k: int, feasible_next, conservative: bool = False) -> np.ndarray:
    """Feasible nodes at t_k given the feasible nodes at t_{k+1}.

    A node is infeasible when c(x) > 0 or when every P1 action admits a P2
    reply whose successor is infeasible.
    """
    nodes = spec.lattice.nodes
    bad, _ = successor_infeasible(spec, k, nodes, np.asarray(feasible_next, bool), conservative)
    forced = np.all(np.any(bad, axis=2), axis=1)
    violated = spec.constraint_values(nodes) > 0
    return ~(forced | violated)


def compute_masks(spec: GameSpec, conservative: bool = False) -> FeasibilityMask:
    L = spec.L
    out = np.zeros((L + 1, spec.lattice.size), dtype=bool)
    out[L] = terminal_mask(spec.lattice, spec.constraint_values)
    for k in range(L - 1, -1, -1):
        out[k] = backup_mask(spec, k, out[k + 1], conservative)
    return FeasibilityMask(out, spec.lattice)


def is_feasible(mask: FeasibilityMask, k: int, x) -> bool:
    """Nearest-node lookup of the mask at step k."""
    x = np.asarray(x, dtype=float)
    if not np.all(mask.lattice.contains(x)):
        raise ValueError("state outside the lattice bounds")
    return bool(mask.feasible[k, int(mask.lattice.nearest(x))])


def pursuit_action(spec: GameSpec, mask: FeasibilityMask, k: int, x) -> int:
    """P2's action index that best keeps x in the infeasible set.

    Scores each v by how many P1 actions it punishes with an infeasible
    successor, then by the smallest constraint value it guarantees.
    """
    x = np.asarray(x, float)[None, :]
    nxt = mask.feasible[min(k + 1, mask.L)]
    bad, _ = successor_infeasible(spec, k, x, nxt)
    Xn, _ = spec.successors(k, x)
    c = spec.constraint_values(Xn)[0]         # (nu, nv)
    hits = bad[0].sum(axis=0)
    depth = c.min(axis=0)
    return int(np.lexsort((-depth, -hits))[0])


def flee_action(spec: GameSpec, mask: FeasibilityMask, k: int, x) -> int:
    """P1's action index minimizing the worst-case constraint value of the successor."""
    x = np.asarray(x, float)[None, :]
    Xn, _ = spec.successors(k, x)
    c = spec.constraint_values(Xn)[0]
    return int(np.argmin(c.max(axis=1)))
