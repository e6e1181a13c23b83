"""Rollouts under the synthesized strategies and the summary metrics."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import GameSpec, as_belief, dynamics_step
from .dual import ConjugateTable, init_dual
from .primal import ValueTable, stage_minimax
from .strategy import BestResponder, PlayerOne, PlayerTwo

PURE_TOL = 1e-9


@dataclass
class TrajectoryRecord:
    """One rollout.

    beliefs[0] is the prior and beliefs[k + 1] the belief attached to P1's
    step-k action; duals follow the same layout (None without a dual table).
    """

    times: list
    states: list
    p1_actions: list
    p2_actions: list
    beliefs: list
    duals: list
    flags: list
    type: int
    payoff: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "TrajectoryRecord":
        return cls(**json.loads(line))

    @property
    def L(self) -> int:
        return len(self.p1_actions)


def _running(spec: GameSpec, k: int, u, v, type_index: int) -> float:
    if spec.running is None:
        return 0.0
    l = np.asarray(spec.running(np.atleast_2d(u), np.atleast_2d(v), spec.grid.t(k)), float)
    return float(l[0, 0, type_index] if l.ndim == 3 else l[0, 0])


def realized_payoff(spec: GameSpec, rec: TrajectoryRecord) -> float:
    """Terminal plus running payoff of a record; K if the constraint was ever violated."""
    X = np.asarray(rec.states, float).reshape(len(rec.states), -1)
    if np.any(spec.constraint_values(X) > 0):
        return float(spec.K)
    total = float(spec.terminal_payoffs(X[-1:])[0, rec.type])
    for k in range(rec.L):
        total += spec.tau * _running(spec, k, rec.p1_actions[k], rec.p2_actions[k], rec.type)
    return total


def rollout(spec: GameSpec, table: ValueTable, conj: Optional[ConjugateTable], x0, p0=None,
            type_source: Optional[int] = None, seed: Union[int, np.random.Generator] = 0,
            players: Optional[tuple] = None, ph0=None) -> TrajectoryRecord:
    """Play one game with simultaneous moves.

    Without a conjugate table P2 best-responds at the common belief.  A fixed
    `type_source` conditions on P1's type; None samples it from p0.  `ph0`
    overrides the dual initialization.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = as_belief(spec.prior if p0 is None else p0)
    x = np.asarray(x0, float).reshape(-1)
    one, two = players or (PlayerOne(table), PlayerTwo(conj) if conj is not None else BestResponder(table))
    i = int(rng.choice(len(p), p=p.weights)) if type_source is None else int(type_source)
    ph = None
    if conj is not None:
        ph = np.asarray(ph0, float) if ph0 is not None else init_dual(table, x, p)

    rec = TrajectoryRecord(times=[float(t) for t in spec.grid.times], states=[x.tolist()],
                           p1_actions=[], p2_actions=[], beliefs=[p.weights.tolist()],
                           duals=[None if ph is None else ph.tolist()], flags=[], type=i,
                           payoff=0.0)
    for k in range(spec.L):
        flags = []
        dec, u, post = one.act(k, x, p, i, rng)
        if dec.resign:
            flags.append("resign")
        if conj is not None:
            d2, v, ph = two.act(k, x, ph, rng)
            if d2.pursuit:
                flags.append("pursuit")
        else:
            v = two.act(k, x, p, rng)
        xn, clipped = dynamics_step(spec.dynamics, x, u, v, spec.tau, spec.lattice)
        if np.any(clipped):
            flags.append("clip")
        rec.p1_actions.append(np.asarray(u, float).tolist())
        rec.p2_actions.append(np.asarray(v, float).tolist())
        rec.beliefs.append(post.weights.tolist())
        rec.duals.append(None if ph is None else np.asarray(ph, float).tolist())
        rec.flags.append(flags)
        rec.states.append(xn.tolist())
        x, p = xn, post
    rec.payoff = realized_payoff(spec, rec)
    return rec


def reveal_step(rec: TrajectoryRecord) -> int:
    """Index of the first step whose action leaves a degenerate belief; L if none does."""
    for k in range(rec.L):
        if max(rec.beliefs[k + 1]) >= 1.0 - PURE_TOL:
            return k
    return rec.L


def reveal_delay(records: Sequence[TrajectoryRecord]) -> float:
    L = {r.L for r in records}
    if len(L) > 1:
        raise ValueError("records have different horizons")
    return float(np.mean([reveal_step(r) for r in records]))


def advantage(table: ValueTable, k: int, x, p) -> float:
    """Stage value at the fixed belief minus the convexified value (nonnegative)."""
    spec = table.spec
    x = np.asarray(x, float)
    if not table.mask.feasible[k, int(spec.lattice.nearest(x))]:
        raise ValueError("advantage is defined on feasible states only")
    stage, _, _ = stage_minimax(table.values[k + 1], k, x, p, spec, table.mask.feasible[k + 1],
                                table.beliefs)
    return stage - table.value(k, x, p)


def advantage_series(table: ValueTable, rec: TrajectoryRecord) -> list:
    """Per-step advantage along a recorded trajectory (None once P1 resigns)."""
    out = []
    for k in range(rec.L):
        try:
            out.append(advantage(table, k, rec.states[k], rec.beliefs[k]))
        except ValueError:
            out.append(None)
    return out


def monte_carlo(spec: GameSpec, table: ValueTable, conj: Optional[ConjugateTable], x0,
                n_runs: int, seeds: Optional[Iterable[int]] = None, p0=None,
                type_source: Optional[int] = None,
                metrics: Sequence[str] = ("payoff", "reveal_delay", "violations")):
    """Independent rollouts, one seed each; returns summary statistics and the records."""
    seeds = list(range(n_runs)) if seeds is None else list(seeds)
    if len(seeds) != n_runs:
        raise ValueError("need one seed per run")
    players = (PlayerOne(table), PlayerTwo(conj) if conj is not None else BestResponder(table))
    p = as_belief(spec.prior if p0 is None else p0)
    ph0 = init_dual(table, x0, p) if conj is not None else None
    recs = [rollout(spec, table, conj, x0, p, type_source, s, players, ph0) for s in seeds]
    out: dict = {"n": n_runs}
    if "payoff" in metrics:
        pay = np.array([r.payoff for r in recs])
        out.update(mean_payoff=float(pay.mean()), std_payoff=float(pay.std(ddof=1)) if n_runs > 1 else 0.0)
        out["se_payoff"] = out["std_payoff"] / np.sqrt(n_runs)
    if "reveal_delay" in metrics:
        out["reveal_delay"] = reveal_delay(recs)
    if "violations" in metrics:
        X = np.concatenate([np.asarray(r.states, float).reshape(len(r.states), -1) for r in recs])
        out["violations"] = int(np.sum(spec.constraint_values(X) > 0))
    return out, recs
