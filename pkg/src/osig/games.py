"""Ready-made game specifications: beer-quiche, the 1-D corridor and stateless Hexner."""
from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .core import (ActionSet, GameSpec, SingleIntegrator, StateLattice, Static, TimeGrid,
                   belief_project)

# P1-maximizer payoffs, indexed [type][P1 choice][P2 choice]; types (T, W),
# P1 choices (B, Q), P2 choices (b, d).
BEER_QUICHE_PAYOFF = np.array([[[2.0, 1.0], [1.0, 0.0]],
                               [[-2.0, 0.0], [-1.0, 2.0]]])
# encoding of the history in the 2-D state
BEER, QUICHE, BULLY, DEFER = 1.0, -1.0, 1.0, -1.0


def beer_quiche_terminal(X):
    """Negated table payoff at completed histories, zero elsewhere."""
    X = np.asarray(X, float)
    g = np.zeros((len(X), 2))
    for n, (a, b) in enumerate(X):
        if a != 0 and b != 0:
            i, j = (0 if a == BEER else 1), (0 if b == BULLY else 1)
            g[n] = -BEER_QUICHE_PAYOFF[:, i, j]
    return g


def beer_quiche_actions():
    """P1 picks the meal at step 0, P2 responds at step 1."""
    return [ActionSet(u=[[BEER], [QUICHE]], v=[[0.0]]),
            ActionSet(u=[[0.0]], v=[[BULLY], [DEFER]])]


def beer_quiche_game(belief_count: int = 31, dual_bounds=((-14.0, 14.0), (-14.0, 14.0)),
                     dual_counts=(29, 29), K: float = 100.0, prior=(1 / 3, 2 / 3)) -> GameSpec:
    """Two-step beer-quiche game with P1 minimizing the negated payoffs.

    x[0] records P1's meal (B = +1, Q = -1, undecided = 0), x[1] records P2's
    response (b = +1, d = -1).  P1 moves at t = 0, P2 at t = 1.
    """
    if (belief_count - 1) % 3:
        raise ValueError("the belief lattice must contain 1/3 and 2/3")
    return GameSpec(dynamics=SingleIntegrator(1, 1),
                    lattice=StateLattice([-1, -1], [1, 1], [3, 3]),
                    actions=beer_quiche_actions(), n_types=2, terminal=beer_quiche_terminal,
                    grid=TimeGrid(2.0, 2), K=K, prior=belief_project(prior),
                    belief_count=belief_count, dual_bounds=dual_bounds,
                    dual_counts=dual_counts, name="beer_quiche")


def target_payoff(targets: Sequence, positions: Callable, weights=(1.0, 1.0)):
    """g_i(x) = a |pos1 - z_i|^2 - b |pos2 - z_i|^2 for target z_i of type i."""
    Z = np.asarray(targets, float)
    Z = Z.reshape(len(Z), -1)
    a_w, b_w = weights

    def terminal(X):
        a, b = positions(np.asarray(X, float))
        return (a_w * ((a[:, None, :] - Z[None]) ** 2).sum(-1)
                - b_w * ((b[:, None, :] - Z[None]) ** 2).sum(-1))
    return terminal


def separation_constraint(radius: float, positions: Callable):
    """c(x) = r - |pos1 - pos2|; feasible when the players are at least r apart."""
    def c(X):
        a, b = positions(np.asarray(X, float))
        return radius - np.linalg.norm(a - b, axis=-1)
    return c


def effort_payoff(u_weight: float, v_weight: float):
    """l(u, v) = a |u|^2 - b |v|^2."""
    def running(U, V, t):
        return u_weight * (U ** 2).sum(-1)[:, None] - v_weight * (V ** 2).sum(-1)[None, :]
    return running


def corridor_game(nodes: int = 11, bound: float = 1.0, horizon: float = 0.6, steps: int = 3,
                  p1_speed: float = 1.0, p2_speed: float = 1.0, radius: float = 0.05,
                  targets=(-0.5, 0.5), effort=(0.0, 0.0), K: Optional[float] = None,
                  prior=(0.5, 0.5), belief_count: int = 101,
                  dual_bounds=((-3.0, 3.0), (-3.0, 3.0)), dual_counts=(31, 31)) -> GameSpec:
    """Both players on a segment; x = (P1 position, P2 position).

    Each player moves left, stays or moves right at its own speed.  P1 must
    keep at least `radius` away from P2 and wants to end nearer its private
    target than P2 does.
    """
    dyn = SingleIntegrator(1, 1)
    lattice = StateLattice([-bound, -bound], [bound, bound], [nodes, nodes])
    acts = ActionSet(u=[[-p1_speed], [0.0], [p1_speed]], v=[[-p2_speed], [0.0], [p2_speed]])
    running = effort_payoff(*effort) if any(effort) else None
    if K is None:
        zmax = float(np.max(np.abs(targets)))
        lmax = max(effort[0] * p1_speed ** 2, effort[1] * p2_speed ** 2)
        K = 2.0 * ((bound + zmax) ** 2 + horizon * lmax) + 1.0
    return GameSpec(dynamics=dyn, lattice=lattice, actions=acts, n_types=len(targets),
                    terminal=target_payoff(targets, dyn.positions),
                    constraint=separation_constraint(radius, dyn.positions),
                    running=running, grid=TimeGrid(horizon, steps), K=K,
                    prior=belief_project(prior), belief_count=belief_count,
                    dual_bounds=dual_bounds, dual_counts=dual_counts, name="corridor",
                    info=dict(radius=radius, targets=list(targets)))


def random_corridor_game(rng: np.random.Generator, belief_count: int = 101, **kw) -> GameSpec:
    """Corridor game whose moves land on lattice nodes (11 nodes, 3 steps of 0.2 s)."""
    z = rng.uniform(-1, 1, size=2).round(2)
    eff = tuple(rng.choice([0.0, 0.05, 0.1], size=2))
    return corridor_game(nodes=11, horizon=0.6, steps=3,
                         p1_speed=float(rng.choice([1.0, 2.0])),
                         p2_speed=float(rng.choice([1.0, 2.0])),
                         radius=float(rng.choice([0.05, 0.25])),
                         targets=tuple(z), effort=eff, belief_count=belief_count, **kw)


def hexner_running(d1: Callable, d2: Callable, types=(-1.0, 1.0)):
    """Per-type l_i(u, v, t) = (u - theta_i)^2 d1(t) - (v - theta_i)^2 d2(t), shape (nu, nv, I)."""
    theta = np.asarray(types, float)

    def running(U, V, t):
        a = (U[:, 0][:, None] - theta[None, :]) ** 2 * float(d1(t))      # (nu, I)
        b = (V[:, 0][:, None] - theta[None, :]) ** 2 * float(d2(t))      # (nv, I)
        return a[:, None, :] - b[None, :, :]
    return running


def hexner_stateless_game(d1: Callable, d2: Callable, horizon: float = 1.0, steps: int = 10,
                          action_count: int = 101, belief_count: int = 101,
                          types=(-1.0, 1.0), prior=(0.5, 0.5),
                          dual_bounds=((-1.0, 0.5), (-1.0, 0.5)), dual_counts=(61, 61),
                          K: Optional[float] = None) -> GameSpec:
    """Hexner's game after eliminating the state.

    Both players pick a point in [-1, 1]; type i pays (u - theta_i)^2 d1(t)
    and receives (v - theta_i)^2 d2(t) per unit time.  p[0] is the
    probability of theta = -1.
    """
    theta = np.asarray(types, float)
    grid = np.linspace(-1.0, 1.0, action_count)
    acts = ActionSet(u=grid[:, None], v=grid[:, None], u_bounds=(-1, 1), v_bounds=(-1, 1))
    running = hexner_running(d1, d2, theta)

    def terminal(X):
        return np.zeros((len(X), len(theta)))

    if K is None:
        ts = np.linspace(0.0, horizon, 201)
        dmax = float(np.max(np.maximum(np.abs(d1(ts)), np.abs(d2(ts)))))
        K = 10.0 * (4.0 * dmax * horizon + 1.0)
    return GameSpec(dynamics=Static(1, 1), lattice=StateLattice([], [], []), actions=acts,
                    n_types=len(theta), terminal=terminal, running=running,
                    grid=TimeGrid(horizon, steps), K=K, prior=belief_project(prior),
                    belief_count=belief_count, dual_bounds=dual_bounds,
                    dual_counts=dual_counts, name="hexner_stateless")
