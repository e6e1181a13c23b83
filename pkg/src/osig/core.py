"""Domain types, lattices and the explicit Euler step shared by the solvers.

Convention: Player 1 minimizes everywhere in this package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np


class NumericGuardError(RuntimeError):
    """A numerical safety check failed (non-finite values, lattice too small, ...)."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ----------------------------------------------------------------------------
# beliefs and dual vectors


@dataclass(frozen=True, eq=False)
class Belief:
    """Common belief over Player 1's type."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("a belief needs at least two types")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"not a probability vector: {w}")
        object.__setattr__(self, "weights", _frozen(w))

    def __len__(self):
        return self.weights.size

    def __getitem__(self, i):
        return self.weights[i]

    def is_pure(self, tol: float = 1e-9) -> bool:
        return bool(np.max(self.weights) >= 1.0 - tol)


def belief_project(weights) -> Belief:
    """Floor negatives at zero and renormalize."""
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("belief entries must be finite")
    w = np.maximum(w, 0.0)
    s = w.sum()
    if s < 1e-9:
        raise ValueError("belief weights sum to (almost) zero")
    return Belief(w / s)


def as_belief(p) -> Belief:
    return p if isinstance(p, Belief) else belief_project(p)


@dataclass(frozen=True, eq=False)
class DualVector:
    entries: np.ndarray
    cap: float = np.inf

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if not np.all(np.isfinite(e)):
            raise ValueError("dual vector must be finite")
        if np.any(np.abs(e) > self.cap):
            raise ValueError("dual vector exceeds the cap K")
        object.__setattr__(self, "entries", _frozen(e))


# ----------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class TimeGrid:
    horizon: float
    steps: int

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("steps must be a positive integer")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def tau(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        t = np.arange(self.steps + 1) * self.tau
        t[-1] = self.horizon
        return t

    def t(self, k: int) -> float:
        return self.horizon if k == self.steps else k * self.tau


class StateLattice:
    """Uniform tensor lattice; nodes are stored row-major (last axis fastest).

    A zero-dimensional lattice has a single node and models stateless games.
    """

    def __init__(self, lower: Sequence[float], upper: Sequence[float], counts: Sequence[int]):
        lo = np.atleast_1d(np.asarray(lower, dtype=float)).reshape(-1)
        hi = np.atleast_1d(np.asarray(upper, dtype=float)).reshape(-1)
        n = np.atleast_1d(np.asarray(counts)).reshape(-1).astype(int)
        if not (lo.size == hi.size == n.size):
            raise ValueError("bounds and counts must have the same length")
        if np.any(n < 2):
            raise ValueError("every dimension needs at least two nodes")
        if np.any(hi <= lo):
            raise ValueError("upper bounds must exceed lower bounds")
        self.lower = _frozen(lo)
        self.upper = _frozen(hi)
        self.counts = tuple(int(c) for c in n)
        self.spacing = _frozen((hi - lo) / np.maximum(n - 1, 1))
        self._strides = np.array(
            [int(np.prod(self.counts[i + 1:])) for i in range(len(self.counts))], dtype=int)
        axes = [lo[i] + self.spacing[i] * np.arange(self.counts[i]) for i in range(self.dim)]
        for i, ax in enumerate(axes):
            ax[-1] = hi[i]
        self.axes = tuple(_frozen(a) for a in axes)
        if self.dim:
            mesh = np.meshgrid(*self.axes, indexing="ij")
            nodes = np.stack([m.reshape(-1) for m in mesh], axis=1)
        else:
            nodes = np.zeros((1, 0))
        self.nodes = _frozen(nodes)
        corners = list(itertools.product((0, 1), repeat=self.dim))
        self._corners = np.array(corners, dtype=int).reshape(len(corners), self.dim)

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts)) if self.dim else 1

    def __repr__(self):
        return f"StateLattice(lower={self.lower.tolist()}, upper={self.upper.tolist()}, counts={list(self.counts)})"

    def describe(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist(), "counts": list(self.counts)}

    def index(self, multi) -> np.ndarray:
        multi = np.asarray(multi, dtype=int)
        return multi @ self._strides if self.dim else np.zeros(multi.shape[:-1], dtype=int)

    def multi_index(self, flat) -> np.ndarray:
        flat = np.asarray(flat, dtype=int)
        out = []
        for s, c in zip(self._strides, self.counts):
            out.append((flat // s) % c)
        return np.stack(out, axis=-1) if out else np.zeros(flat.shape + (0,), dtype=int)

    def state(self, flat) -> np.ndarray:
        return self.nodes[np.asarray(flat, dtype=int)]

    def contains(self, x, tol: float = 1e-9) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower - tol) & (x <= self.upper + tol), axis=-1)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected {self.dim}-dimensional states, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite state")
        if not np.all(self.contains(x)):
            raise ValueError("state outside the lattice bounds")
        return x

    def nearest(self, x) -> np.ndarray:
        """Flat index of the nearest node (half-way ties round up)."""
        x = self._check(x)
        if not self.dim:
            return np.zeros(x.shape[:-1], dtype=int)
        t = (x - self.lower) / self.spacing
        i = np.clip(np.floor(t + 0.5 + 1e-9), 0, np.array(self.counts) - 1).astype(int)
        return self.index(i)

    def cell(self, x):
        """Corner indices and multilinear weights, each of shape (..., 2**d)."""
        x = self._check(x)
        lead = x.shape[:-1]
        if not self.dim:
            return np.zeros(lead + (1,), dtype=int), np.ones(lead + (1,))
        t = (x - self.lower) / self.spacing
        n = np.array(self.counts)
        i0 = np.clip(np.floor(t), 0, n - 2).astype(int)
        frac = np.clip(t - i0, 0.0, 1.0)
        # snap round-off so that nodes get exact unit weights
        frac = np.where(np.abs(frac) < 1e-10, 0.0, np.where(np.abs(frac - 1) < 1e-10, 1.0, frac))
        c = self._corners  # (2**d, d)
        idx = self.index(i0[..., None, :] + c)
        w = np.prod(np.where(c == 1, frac[..., None, :], 1.0 - frac[..., None, :]), axis=-1)
        return idx, w


class BeliefLattice:
    """Uniform grid on p[0] for two types; node j is the belief (p_j, 1 - p_j)."""

    def __init__(self, count: int = 101):
        if count < 2:
            raise ValueError("belief lattice needs at least two nodes")
        self.count = int(count)
        self.p = _frozen(np.linspace(0.0, 1.0, self.count))
        self.beliefs = _frozen(np.stack([self.p, 1.0 - self.p], axis=1))

    @property
    def spacing(self) -> float:
        return 1.0 / (self.count - 1)

    def node_of(self, p0: float, tol: float = 1e-9) -> Optional[int]:
        j = int(round(p0 * (self.count - 1)))
        return j if abs(self.p[j] - p0) <= tol else None


class DualLattice:
    """Rectangular p-hat lattice for two types, row-major over (axis 0, axis 1)."""

    def __init__(self, bounds=((-14.0, 14.0), (-14.0, 14.0)), counts=(29, 29)):
        bounds = np.asarray(bounds, dtype=float)
        if bounds.shape != (2, 2):
            raise ValueError("the dual lattice is two-dimensional")
        self.grid = StateLattice(bounds[:, 0], bounds[:, 1], counts)
        self.nodes = self.grid.nodes
        self.axes = self.grid.axes
        self.counts = self.grid.counts
        self.lower, self.upper = self.grid.lower, self.grid.upper

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def spacing(self) -> float:
        return float(np.max(self.grid.spacing))

    def describe(self) -> dict:
        return self.grid.describe()

    def translate_inside(self, q: np.ndarray):
        """Move points along (1, 1) into the box.

        Returns (moved points, shift c, ok) with q = moved + c; a conjugate value
        satisfies V*(q) = V*(q - c 1) + c, so the read is exact when ok is True.
        Points that cannot be moved inside are clamped and flagged.
        """
        q = np.asarray(q, dtype=float)
        c_lo = np.max(q - self.upper, axis=-1)
        c_hi = np.min(q - self.lower, axis=-1)
        ok = c_lo <= c_hi + 1e-12
        c = np.clip(0.0, c_lo, np.maximum(c_lo, c_hi))
        moved = np.clip(q - c[..., None], self.lower, self.upper)
        return moved, c, ok


# ----------------------------------------------------------------------------
# dynamics


@dataclass(frozen=True)
class SingleIntegrator:
    """x' = (u, v): P1 drives the first u_dim coordinates, P2 the rest."""

    u_dim: int = 1
    v_dim: int = 1
    family = "single_integrator"
    lipschitz = 0.0

    @property
    def dim(self):
        return self.u_dim + self.v_dim

    def rate(self, x, u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        shape = np.broadcast_shapes(np.shape(x)[:-1], u.shape[:-1], v.shape[:-1])
        return np.concatenate([np.broadcast_to(u, shape + (self.u_dim,)),
                               np.broadcast_to(v, shape + (self.v_dim,))], axis=-1)

    def positions(self, x):
        x = np.asarray(x, float)
        return x[..., :self.u_dim], x[..., self.u_dim:]


@dataclass(frozen=True)
class DoubleIntegrator:
    """Each player controls accelerations; state is (P1 pos, P1 vel, P2 pos, P2 vel)."""

    u_axes: int = 1
    v_axes: int = 1
    family = "double_integrator"
    lipschitz = 1.0

    @property
    def u_dim(self):
        return self.u_axes

    @property
    def v_dim(self):
        return self.v_axes

    @property
    def dim(self):
        return 2 * (self.u_axes + self.v_axes)

    def rate(self, x, u, v):
        x = np.asarray(x, float)
        u, v = np.asarray(u, float), np.asarray(v, float)
        shape = np.broadcast_shapes(x.shape[:-1], u.shape[:-1], v.shape[:-1])
        x = np.broadcast_to(x, shape + (self.dim,))
        a, b = self.u_axes, self.v_axes
        parts = [x[..., a:2 * a], np.broadcast_to(u, shape + (a,)),
                 x[..., 2 * a + b:], np.broadcast_to(v, shape + (b,))]
        return np.concatenate(parts, axis=-1)

    def positions(self, x):
        x = np.asarray(x, float)
        a, b = self.u_axes, self.v_axes
        return x[..., :a], x[..., 2 * a:2 * a + b]


@dataclass(frozen=True, eq=False)
class Affine:
    """x' = A x + Bu u + Bv v."""

    A: np.ndarray
    Bu: np.ndarray
    Bv: np.ndarray
    family = "affine"

    def __post_init__(self):
        for k in ("A", "Bu", "Bv"):
            object.__setattr__(self, k, _frozen(np.atleast_2d(getattr(self, k))))
        d = self.A.shape[0]
        if self.A.shape != (d, d) or self.Bu.shape[0] != d or self.Bv.shape[0] != d:
            raise ValueError("inconsistent affine dynamics shapes")

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def u_dim(self):
        return self.Bu.shape[1]

    @property
    def v_dim(self):
        return self.Bv.shape[1]

    @property
    def lipschitz(self):
        return float(np.linalg.norm(self.A, 2))

    def rate(self, x, u, v):
        return np.asarray(x, float) @ self.A.T + np.asarray(u, float) @ self.Bu.T + np.asarray(v, float) @ self.Bv.T

    def positions(self, x):
        raise NotImplementedError("affine dynamics carry no position layout")


@dataclass(frozen=True)
class Static:
    """No state at all; actions only enter through the running payoff."""

    u_dim: int = 1
    v_dim: int = 1
    family = "static"
    lipschitz = 0.0
    dim = 0

    def rate(self, x, u, v):
        shape = np.broadcast_shapes(np.shape(x)[:-1], np.shape(u)[:-1], np.shape(v)[:-1])
        return np.zeros(shape + (0,))


Dynamics = Union[SingleIntegrator, DoubleIntegrator, Affine, Static]


def dynamics_step(f: Dynamics, x, u, v, tau: float, lattice: Optional[StateLattice] = None):
    """One explicit Euler step, clipped to the lattice box.

    Returns (x_next, clipped) where clipped flags every point that left the box.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ValueError("non-finite input to dynamics_step")
    if not tau > 0:
        raise ValueError("tau must be positive")
    xn = x + tau * f.rate(x, u, v)
    if lattice is None or lattice.dim == 0:
        return xn, np.zeros(xn.shape[:-1], dtype=bool)
    clipped_x = np.clip(xn, lattice.lower, lattice.upper)
    flag = np.any(np.abs(clipped_x - xn) > 1e-12, axis=-1)
    return clipped_x, flag


# ----------------------------------------------------------------------------
# actions and the game


@dataclass(frozen=True, eq=False)
class ActionSet:
    u: np.ndarray
    v: np.ndarray
    u_bounds: Optional[tuple] = None
    v_bounds: Optional[tuple] = None

    def __post_init__(self):
        for name in ("u", "v"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim == 1:
                a = a[:, None]
            if a.ndim != 2 or a.shape[0] == 0:
                raise ValueError(f"action set {name} must be a nonempty list of vectors")
            bounds = getattr(self, f"{name}_bounds")
            if bounds is not None:
                lo, hi = bounds
                if np.any(a < np.asarray(lo) - 1e-12) or np.any(a > np.asarray(hi) + 1e-12):
                    raise ValueError(f"action in {name} outside admissible bounds")
            object.__setattr__(self, name, _frozen(a))

    @property
    def shape(self):
        return self.u.shape[0], self.v.shape[0]


Terminal = Callable[[np.ndarray], np.ndarray]          # (N, d) -> (N, I)
Running = Callable[[np.ndarray, np.ndarray, float], np.ndarray]  # -> (nu, nv) or (nu, nv, I)
Constraint = Callable[[np.ndarray], np.ndarray]        # (N, d) -> (N,)


def no_constraint(x):
    return -np.ones(np.shape(x)[:-1])


@dataclass(frozen=True, eq=False)
class GameSpec:
    """Everything the backups need.

    `actions` is either one ActionSet or a list with one entry per step.
    `running(U, V, t)` returns shape (nu, nv) for a type-independent payoff or
    (nu, nv, I) for one payoff per type; None means no running payoff.
    """

    dynamics: Dynamics
    lattice: StateLattice
    actions: Union[ActionSet, Sequence[ActionSet]]
    n_types: int
    terminal: Terminal
    grid: TimeGrid
    K: float
    running: Optional[Running] = None
    constraint: Constraint = no_constraint
    prior: Optional[Belief] = None
    belief_count: int = 101
    dual_bounds: tuple = ((-14.0, 14.0), (-14.0, 14.0))
    dual_counts: tuple = (29, 29)
    name: str = "game"
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_types < 2:
            raise ValueError("at least two types are required")
        if self.dynamics.dim != self.lattice.dim:
            raise ValueError("dynamics and lattice dimensions differ")
        if not isinstance(self.actions, ActionSet):
            acts = tuple(self.actions)
            if len(acts) != self.grid.steps:
                raise ValueError("need one action set per step")
            object.__setattr__(self, "actions", acts)
        if self.prior is not None:
            object.__setattr__(self, "prior", as_belief(self.prior))
        bound = self.payoff_bound()
        if not self.K > bound:
            raise ValueError(f"cap K={self.K} must exceed the payoff bound {bound:.6g}")

    def actions_at(self, k: int) -> ActionSet:
        return self.actions if isinstance(self.actions, ActionSet) else self.actions[k]

    @property
    def tau(self) -> float:
        return self.grid.tau

    @property
    def L(self) -> int:
        return self.grid.steps

    def terminal_payoffs(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        g = np.asarray(self.terminal(x.reshape(int(np.prod(x.shape[:-1])), self.lattice.dim)), dtype=float)
        return g.reshape(x.shape[:-1] + (self.n_types,))

    def constraint_values(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        c = np.asarray(self.constraint(x.reshape(int(np.prod(x.shape[:-1])), self.lattice.dim)), dtype=float)
        return c.reshape(x.shape[:-1])

    def running_payoff(self, k: int, t: Optional[float] = None) -> Optional[np.ndarray]:
        """Running payoff over the action pairs of step k, or None."""
        if self.running is None:
            return None
        acts = self.actions_at(k)
        return np.asarray(self.running(acts.u, acts.v, self.grid.t(k) if t is None else t), dtype=float)

    def payoff_bound(self) -> float:
        g = np.abs(self.terminal_payoffs(self.lattice.nodes))
        lmax = 0.0
        for k in range(self.grid.steps):
            l = self.running_payoff(k)
            if l is not None and l.size:
                lmax = max(lmax, float(np.max(np.abs(l))))
        return float(np.max(g)) + self.grid.horizon * lmax

    def step(self, x, u, v):
        return dynamics_step(self.dynamics, x, u, v, self.tau, self.lattice)

    def successors(self, k: int, X: np.ndarray):
        """Successors of states X (M, d) under all action pairs: (M, nu, nv, d), clip flags."""
        acts = self.actions_at(k)
        X = np.asarray(X, float)
        return dynamics_step(self.dynamics, X[:, None, None, :], acts.u[None, :, None, :],
                             acts.v[None, None, :, :], self.tau, self.lattice)

    def stage_running(self, k: int, beliefs: np.ndarray) -> Optional[np.ndarray]:
        """tau * expected running payoff at step k over the belief nodes: (nu, nv, P)."""
        l = self.running_payoff(k)
        if l is None:
            return None
        if l.ndim == 2:
            return self.tau * l[:, :, None] * np.ones(len(beliefs))
        return self.tau * np.einsum("uvi,pi->uvp", l, beliefs)

    def shift_vectors(self, k: int) -> Optional[np.ndarray]:
        """tau * l as a vector over types for every action pair: (nu, nv, I)."""
        l = self.running_payoff(k)
        if l is None:
            return None
        if l.ndim == 2:
            l = np.repeat(l[:, :, None], self.n_types, axis=2)
        return self.tau * l

    def belief_lattice(self) -> BeliefLattice:
        return BeliefLattice(self.belief_count)

    def dual_lattice(self) -> DualLattice:
        return DualLattice(self.dual_bounds, self.dual_counts)
