"""Conjugate (dual game) value tables and the dual-variable initialization.

The dual table stores V*(t, x, ph) = sup_p ph.p - V(t, x, p).  It is convex in
ph and moves by exactly c when c is added to every entry of ph; reads that
leave the ph box use that identity to come back inside.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .convex import lower_hull_1d, lower_hull_2d
from .core import DualLattice, GameSpec, NumericGuardError, as_belief
from .primal import ValueTable
from .reach import FeasibilityMask, compute_masks


@dataclass(frozen=True, eq=False)
class ConjugateTable:
    """values[k, n, q]: conjugate value at step k, state node n, ph node q."""

    spec: GameSpec
    values: np.ndarray
    mask: FeasibilityMask
    lattice: DualLattice
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def K(self) -> float:
        return self.spec.K

    def value(self, k: int, x, ph) -> float:
        x = np.asarray(x, float).reshape(1, -1)
        spec = self.spec
        if not self.mask.feasible[k, int(spec.lattice.nearest(x)[0])]:
            return -self.K
        rows = _blend_states(spec, self.values[k], self.mask.feasible[k], x)[0]   # (Q,)
        vals, _ = read_conjugate(self.lattice, rows[None], np.asarray(ph, float)[None])
        return float(vals[0, 0])


def _check_two_types(spec: GameSpec):
    if spec.n_types != 2:
        raise NotImplementedError("the dual game is implemented for two types only")


def check_cap(spec: GameSpec, lattice: DualLattice):
    """The cap must dominate every finite conjugate value on the ph box."""
    need = float(np.max(np.abs(np.concatenate([lattice.lower, lattice.upper])))) + spec.payoff_bound()
    if not spec.K > need:
        raise ValueError(f"cap K={spec.K} must exceed max|ph| + payoff bound = {need:.6g}")


def dual_terminal(x, ph, spec: GameSpec) -> float:
    """max_i (ph_i - g_i(x)) on the feasible set; -K where the constraint is violated."""
    x = np.asarray(x, float).reshape(1, -1)
    if spec.constraint_values(x)[0] > 0:
        return -float(spec.K)
    g = spec.terminal_payoffs(x)[0]
    return float(np.clip(np.max(np.asarray(ph, float) - g), -spec.K, spec.K))


def dual_terminal_table(spec: GameSpec, lattice: DualLattice, feasible) -> np.ndarray:
    g = spec.terminal_payoffs(spec.lattice.nodes)                     # (N, I)
    W = np.max(lattice.nodes[None, :, :] - g[:, None, :], axis=2)     # (N, Q)
    W = np.clip(W, -spec.K, spec.K)
    W[~np.asarray(feasible, bool)] = -spec.K
    return W


def read_conjugate(lattice: DualLattice, rows: np.ndarray, points: np.ndarray):
    """Bilinear read of conjugate rows (R, Q) at points (S, 2).

    Points with no diagonal translate inside the box have p-hat[0] - p-hat[1]
    beyond the box range; there the value p-hat[1] + psi(s) is extended
    linearly in s from the nearest corner, with the slope clipped to [0, 1]
    (the range of p[0]).  Returns values (R, S) and the mask of such points.
    """
    moved, c, ok = lattice.translate_inside(points)
    idx, w = lattice.grid.cell(moved)
    vals = np.einsum("sc,rsc->rs", w, rows[:, idx]) + c[None, :]
    out = ~ok
    if out.any():
        q = np.asarray(points, float)[out]
        s = q[:, 0] - q[:, 1]
        lo, hi = lattice.lower, lattice.upper
        n0, n1 = lattice.counts
        h = lattice.grid.spacing[0]
        ix = lattice.grid.index
        a_hi, b_hi = ix([n0 - 1, 0]), ix([n0 - 2, 0])          # largest s and its neighbour
        a_lo, b_lo = ix([0, n1 - 1]), ix([1, n1 - 1])          # smallest s and its neighbour
        s_hi, s_lo = hi[0] - lo[1], lo[0] - hi[1]
        slope_hi = np.clip((rows[:, a_hi] - rows[:, b_hi]) / h, 0.0, 1.0)
        slope_lo = np.clip((rows[:, b_lo] - rows[:, a_lo]) / h, 0.0, 1.0)
        up = s > s_hi
        ext = np.where(up[None, :],
                       rows[:, a_hi, None] - lo[1] + slope_hi[:, None] * (s - s_hi)[None, :],
                       rows[:, a_lo, None] - hi[1] + slope_lo[:, None] * (s - s_lo)[None, :])
        vals[:, out] = ext + q[None, :, 1]
    return vals, out


def _blend_states(spec: GameSpec, table: np.ndarray, feasible: np.ndarray, X: np.ndarray):
    """Multilinear state blend of table rows over feasible cell corners."""
    idx, w = spec.lattice.cell(X)
    w = w * feasible[idx]
    s = w.sum(axis=-1, keepdims=True)
    w = np.divide(w, s, out=np.zeros_like(w), where=s > 0)
    return np.einsum("...c,...cq->...q", w, table[idx])


def dual_stage_payoffs(spec: GameSpec, k: int, W_next: np.ndarray, feasible_next, X,
                       lattice: DualLattice, points: Optional[np.ndarray] = None):
    """V*_{k+1}(x', ph - tau l(u, v)) for all action pairs: (M, nu, nv, S).

    `points` defaults to every ph node.  Returns the values, the successor
    clip flags and the number of ph reads that fell outside the box range
    of ph[0] - ph[1] and were extrapolated.
    """
    points = lattice.nodes if points is None else np.atleast_2d(points)
    acts = spec.actions_at(k)
    nu, nv = acts.shape
    shifts = spec.shift_vectors(k)
    if shifts is None:
        shifts = np.zeros((nu, nv, spec.n_types))
    uniq, inv = np.unique(shifts.reshape(-1, spec.n_types), axis=0, return_inverse=True)
    inv = inv.reshape(nu, nv)
    S, R = len(points), W_next.shape[0]
    reads = np.empty((len(uniq), R, S))
    extrapolated = 0
    chunk = max(1, 2_000_000 // (S * R))
    for i in range(0, len(uniq), chunk):
        sh = uniq[i:i + chunk]
        r, bad = read_conjugate(lattice, W_next, (points[None] - sh[:, None, :]).reshape(-1, 2))
        reads[i:i + len(sh)] = r.reshape(R, len(sh), S).transpose(1, 0, 2)
        extrapolated += int(bad.sum())

    Xn, clipped = spec.successors(k, np.asarray(X, float))
    idx, w = spec.lattice.cell(Xn)                         # (M, nu, nv, C)
    w = w * feasible_next[idx]
    tot = w.sum(axis=-1, keepdims=True)
    w = np.divide(w, tot, out=np.zeros_like(w), where=tot > 0)
    dead = ~feasible_next[spec.lattice.nearest(Xn)]        # (M, nu, nv)
    M = Xn.shape[0]
    vals = np.empty((M, nu, nv, S))
    for a in range(nu):
        g = reads[inv[a][None, :, None], idx[:, a]]          # (M, nv, C, S)
        vals[:, a] = np.einsum("mbc,mbcq->mbq", w[:, a], g)
    vals[dead] = -spec.K
    return np.clip(vals, -spec.K, spec.K), clipped, extrapolated


def dual_minimax(vals: np.ndarray):
    """min over v of max over u on (M, nu, nv, S): value, argmin v, P1's best reply u."""
    best = vals.max(axis=1)                              # (M, nv, S)
    v = np.argmin(best, axis=1)                          # (M, S)
    value = np.take_along_axis(best, v[:, None, :], axis=1)[:, 0, :]
    at_v = np.take_along_axis(vals, v[:, None, None, :], axis=2)[:, :, 0, :]   # (M, nu, S)
    u = np.argmax(at_v, axis=1)
    return value, v, u


def dual_stage_minimax(W_next: np.ndarray, k: int, x, ph, spec: GameSpec,
                       feasible_next: Optional[np.ndarray] = None,
                       lattice: Optional[DualLattice] = None, strict: bool = True):
    """(value, v*, u*) of the dual stage game at a single ph.

    With `strict`, raises NumericGuardError when a shifted read cannot be
    brought inside the ph box (widen dual_bounds) instead of extrapolating.
    """
    lattice = lattice or spec.dual_lattice()
    if feasible_next is None:
        feasible_next = np.ones(spec.lattice.size, dtype=bool)
    ph = np.asarray(ph, float).reshape(1, 2)
    vals, _, extrapolated = dual_stage_payoffs(spec, k, W_next, feasible_next,
                                               np.asarray(x, float).reshape(1, -1), lattice, ph)
    if extrapolated and strict:
        raise NumericGuardError(
            "a shifted dual read left the ph lattice; widen dual_bounds so that "
            "ph - tau*l(u, v) stays representable")
    value, v, u = dual_minimax(vals)
    acts = spec.actions_at(k)
    return float(value[0, 0]), acts.v[v[0, 0]], acts.u[u[0, 0]]


def dual_backup_step(W_next: np.ndarray, k: int, spec: GameSpec, mask: FeasibilityMask,
                     lattice: DualLattice, diagnostics: Optional[dict] = None) -> np.ndarray:
    out = np.full((spec.lattice.size, lattice.size), -float(spec.K))
    live = np.flatnonzero(mask.feasible[k])
    if live.size:
        vals, clipped, extrapolated = dual_stage_payoffs(spec, k, W_next, mask.feasible[k + 1],
                                                    spec.lattice.nodes[live], lattice)
        value, _, _ = dual_minimax(vals)
        a0, a1 = lattice.axes
        for r, n in enumerate(live):
            out[n] = lower_hull_2d(a0, a1, value[r].reshape(lattice.counts)).nodes()
        if diagnostics is not None:
            diagnostics.setdefault("clipped_successors", []).append(int(clipped.sum()))
            diagnostics.setdefault("extrapolated_reads", []).append(extrapolated)
    return out


def dual_solve(spec: GameSpec, mask: Optional[FeasibilityMask] = None) -> ConjugateTable:
    """Backward induction of the conjugate table."""
    _check_two_types(spec)
    mask = mask or compute_masks(spec)
    lattice = spec.dual_lattice()
    check_cap(spec, lattice)
    L = spec.L
    W = np.empty((L + 1, spec.lattice.size, lattice.size))
    W[L] = dual_terminal_table(spec, lattice, mask.feasible[L])
    diag: dict = {}
    for k in range(L - 1, -1, -1):
        W[k] = dual_backup_step(W[k + 1], k, spec, mask, lattice, diag)
    for key in list(diag):
        diag[key] = diag[key][::-1]
    return ConjugateTable(spec, W, mask, lattice, diag)


def init_dual(table: ValueTable, x, p, k: int = 0) -> np.ndarray:
    """A subgradient of V(t_k, x, .) at p, written as a dual vector."""
    _check_two_types(table.spec)
    p = as_belief(p)
    x = np.asarray(x, float).reshape(1, -1)
    spec = table.spec
    if not table.mask.feasible[k, int(spec.lattice.nearest(x)[0])]:
        raise ValueError("init_dual needs a feasible state")
    row = _blend_states(spec, table.values[k], table.mask.feasible[k], x)[0]
    hull = lower_hull_1d(table.beliefs.p, row)
    p0 = float(p[0])
    V = float(hull(p0))
    s = hull.slope_at(p0)
    return np.array([V + s * (1.0 - p0), V - s * p0])
