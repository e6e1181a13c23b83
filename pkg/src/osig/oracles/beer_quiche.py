"""Closed-form equilibrium of the two-step beer-quiche signaling game.

Natural convention: P1 (tough T or weak W) maximizes the table in
`games.BEER_QUICHE_PAYOFF`.  The `min_*` accessors negate values and dual
vectors so they can be compared with the solver, where P1 minimizes.
p is the probability of the tough type.
"""
from __future__ import annotations

import numpy as np

from ..games import BEER_QUICHE_PAYOFF, beer_quiche_game

KINK = 2.0 / 3.0
T, W = 0, 1
B, Q = 0, 1
BULLY, DEFER = 0, 1


class BeerQuiche:
    """Equilibrium value, belief split, dual vector and both players' mixes."""

    payoff = BEER_QUICHE_PAYOFF

    def value(self, p: float) -> float:
        """P1-maximizer value at the root."""
        p = float(p)
        return 2.5 * p - 1.0 if p < KINK else p

    def min_value(self, p: float) -> float:
        return -self.value(p)

    def slope(self, p: float) -> float:
        if np.isclose(p, KINK, atol=1e-12):
            return 0.5 * (2.5 + 1.0)
        return 2.5 if p < KINK else 1.0

    def split(self, p: float) -> dict:
        """Weights, posteriors (probability of T) and meals of P1's belief split."""
        p = float(p)
        if p >= KINK:
            return {"weights": np.array([1.0]), "posteriors": np.array([p]), "meals": ["B"]}
        lam_b = p / KINK
        return {"weights": np.array([1.0 - lam_b, lam_b]), "posteriors": np.array([0.0, KINK]),
                "meals": ["Q", "B"]}

    def p1_mix(self, p: float) -> np.ndarray:
        """mix[type, meal]: probability that each type orders each meal."""
        p = float(p)
        if p >= KINK:
            return np.array([[1.0, 0.0], [1.0, 0.0]])
        pb = 0.5 * p / (1.0 - p)
        return np.array([[1.0, 0.0], [pb, 1.0 - pb]])

    def p2_mix(self, p: float) -> np.ndarray:
        """mix[meal, response]: P2's probability of bullying or deferring."""
        after_b = [0.5, 0.5] if float(p) < KINK else [0.0, 1.0]
        return np.array([after_b, [1.0, 0.0]])

    def dual(self, p: float) -> np.ndarray:
        """(V + s(1 - p), V - s p) for the P1-maximizer value."""
        V, s = self.value(p), self.slope(p)
        return np.array([V + s * (1.0 - p), V - s * p])

    def min_dual(self, p: float) -> np.ndarray:
        return -self.dual(p)

    def spec(self, **kw):
        return beer_quiche_game(**kw)

    def type_payoffs(self, p: float, p1_mix=None, p2_mix=None) -> np.ndarray:
        """payoff[type, meal] of each pure meal against P2's mix."""
        y = self.p2_mix(p) if p2_mix is None else p2_mix
        return np.einsum("imr,mr->im", self.payoff, y)

    def deviation_gain(self, p: float) -> float:
        """Largest gain from any unilateral pure deviation (P1 types and P2 info sets)."""
        x, y = self.p1_mix(p), self.p2_mix(p)
        per_meal = self.type_payoffs(p, x, y)                  # (type, meal)
        eq = (x * per_meal).sum(axis=1)
        gain = float(np.max(per_meal - eq[:, None]))
        prior = np.array([p, 1.0 - p])
        for m in (B, Q):
            reach = prior * x[:, m]
            if reach.sum() > 0:
                post = reach / reach.sum()
            else:
                post = np.array([0.0, 1.0])     # off-path belief: the weak type
            by_resp = post @ self.payoff[:, m, :]                 # P1 payoff per response
            gain = max(gain, float(by_resp @ y[m] - by_resp.min()))
        return gain
