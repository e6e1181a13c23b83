"""Behavioral strategies from hull splits, plus the belief update laws."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .convex import SplitPlan, lower_hull_1d, lower_hull_2d
from .core import Belief, NumericGuardError, as_belief, belief_project
from .dual import ConjugateTable, dual_minimax, dual_stage_payoffs
from .primal import ValueTable, stage_at
from .reach import flee_action, pursuit_action


@dataclass(frozen=True, eq=False)
class P1Decision:
    """Either a resignation or a type-dependent lottery over (action, posterior).

    probs[j, i] is the probability that type i plays actions[j].
    """

    resign: bool
    action_index: np.ndarray
    actions: np.ndarray
    weights: np.ndarray
    posteriors: np.ndarray
    probs: np.ndarray
    prior: np.ndarray
    split: Optional[SplitPlan] = None

    @property
    def m(self) -> int:
        return len(self.weights)


@dataclass(frozen=True, eq=False)
class P2Decision:
    """Either a pursuit move or a lottery over (action, next dual vector)."""

    pursuit: bool
    action_index: np.ndarray
    actions: np.ndarray
    weights: np.ndarray
    next_duals: np.ndarray
    split: Optional[SplitPlan] = None


def _group(labels: np.ndarray, weights: np.ndarray, points: np.ndarray):
    """Merge split vertices that share an action into their weighted mean."""
    keys = np.unique(labels)
    lam = np.array([weights[labels == a].sum() for a in keys])
    pts = np.array([weights[labels == a] @ points[labels == a] / l for a, l in zip(keys, lam)])
    return keys, lam, pts


def _key(*arrays) -> tuple:
    return tuple(round(float(v), 12) for a in arrays for v in np.atleast_1d(a))


class PlayerOne:
    """Informed player: splits the common belief on the primal hull."""

    def __init__(self, table: ValueTable):
        self.table = table
        self.spec = table.spec
        self._cache: dict = {}

    def decide(self, k: int, x, p) -> P1Decision:
        p = as_belief(p)
        x = np.asarray(x, float)
        key = _key(k, x, p.weights)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        spec, table = self.spec, self.table
        acts = spec.actions_at(k)
        if not table.mask.feasible[k, int(spec.lattice.nearest(x))]:
            a = flee_action(spec, table.mask, k, x)
            dec = P1Decision(True, np.array([a]), acts.u[[a]], np.ones(1), p.weights[None],
                             np.ones((1, spec.n_types)), p.weights)
        else:
            st = stage_at(table, k, x)
            bl = table.beliefs
            sp = lower_hull_1d(bl.p, st.value).split(p[0])
            # hull vertices are lattice nodes, so the stage argmin is defined there
            labels = st.u[sp.indices]
            verts = bl.beliefs[sp.indices]
            keys, lam, post = _group(labels, sp.weights, verts)
            post = np.clip(post, 0.0, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                probs = np.where(p.weights[None] > 0, lam[:, None] * post / p.weights[None], 0.0)
            sp = SplitPlan(sp.query, sp.weights, sp.points, sp.indices, sp.values,
                           actions=[acts.u[i] for i in labels])
            dec = P1Decision(False, keys, acts.u[keys], lam, post, probs, p.weights, sp)
        self._cache[key] = dec
        return dec

    def act(self, k: int, x, p, type_index: int, rng: np.random.Generator):
        """Sample an action for the given true type: (decision, action, posterior)."""
        p = as_belief(p)
        if p[type_index] <= 0:
            raise ValueError(f"type {type_index} has zero probability under the belief")
        dec = self.decide(k, x, p)
        pr = dec.probs[:, type_index]
        j = int(rng.choice(len(pr), p=pr / pr.sum())) if len(pr) > 1 else 0
        return dec, dec.actions[j], belief_project(dec.posteriors[j])


class PlayerTwo:
    """Uninformed player: splits the dual vector on the conjugate hull."""

    def __init__(self, conj: ConjugateTable):
        self.conj = conj
        self.spec = conj.spec
        self._cache: dict = {}

    def decide(self, k: int, x, ph) -> P2Decision:
        x = np.asarray(x, float)
        ph = np.asarray(ph, float)
        key = _key(k, x, ph)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        spec, conj, dl = self.spec, self.conj, self.conj.lattice
        acts = spec.actions_at(k)
        if not conj.mask.feasible[k, int(spec.lattice.nearest(x))]:
            b = pursuit_action(spec, conj.mask, k, x)
            dec = P2Decision(True, np.array([b]), acts.v[[b]], np.ones(1), ph[None])
        else:
            moved, c, ok = dl.translate_inside(ph[None])
            if not ok[0]:
                raise NumericGuardError("dual vector outside the ph lattice; widen dual_bounds")
            vals, _, _ = dual_stage_payoffs(spec, k, conj.values[k + 1], conj.mask.feasible[k + 1],
                                            x[None], dl)
            value, v, u = dual_minimax(vals)
            hull = lower_hull_2d(dl.axes[0], dl.axes[1], value[0].reshape(dl.counts))
            sp = hull.split(moved[0])
            vj, uj = v[0][sp.indices], u[0][sp.indices]
            shift = spec.shift_vectors(k)
            nxt = sp.points + c[0]
            if shift is not None:
                nxt = nxt - shift[uj, vj]
            keys, lam, pts = _group(vj, sp.weights, nxt)
            sp = SplitPlan(sp.query + c[0], sp.weights, sp.points + c[0], sp.indices, sp.values,
                           actions=[acts.v[i] for i in vj], extra={"p1_reply": uj})
            dec = P2Decision(False, keys, acts.v[keys], lam, pts, sp)
        self._cache[key] = dec
        return dec

    def act(self, k: int, x, ph, rng: np.random.Generator):
        dec = self.decide(k, x, ph)
        j = int(rng.choice(len(dec.weights), p=dec.weights)) if len(dec.weights) > 1 else 0
        return dec, dec.actions[j], dec.next_duals[j]


class BestResponder:
    """P2 replying to the announced P1 strategy at the current common belief."""

    def __init__(self, table: ValueTable):
        self.table = table
        self.spec = table.spec
        self._cache: dict = {}

    def act(self, k: int, x, p, rng=None):
        p = as_belief(p)
        key = _key(k, x, p.weights)
        if key not in self._cache:
            spec = self.spec
            if not self.table.mask.feasible[k, int(spec.lattice.nearest(np.asarray(x, float)))]:
                b = pursuit_action(spec, self.table.mask, k, x)
            else:
                st = stage_at(self.table, k, x)
                j = int(np.argmin(np.abs(self.table.beliefs.p - p[0])))
                b = int(st.v[j])
            self._cache[key] = b
        return self.spec.actions_at(k).v[self._cache[key]]


def p1_act(table: ValueTable, k: int, x, p, type_index: int, rng: np.random.Generator):
    """One draw of Player 1's behavioral strategy."""
    return PlayerOne(table).act(k, x, p, type_index, rng)


def p2_act(conj: ConjugateTable, k: int, x, ph, rng: np.random.Generator):
    """One draw of Player 2's behavioral strategy."""
    return PlayerTwo(conj).act(k, x, ph, rng)


def bayes_posterior(p, decision: P1Decision, observed) -> Belief:
    """Bayes update of p after seeing `observed` (an action vector) under the decision."""
    p = as_belief(p)
    obs = np.atleast_1d(np.asarray(observed, float))
    match = [j for j, a in enumerate(decision.actions) if np.allclose(a, obs, atol=1e-12)]
    if not match:
        raise ValueError("observed action has zero probability under the announced strategy")
    like = decision.probs[match[0]]
    joint = p.weights * like
    if joint.sum() <= 0:
        raise ValueError("observed action has zero probability under the announced strategy")
    return belief_project(joint)
