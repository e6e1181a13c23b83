"""Linear-quadratic ingredients of Hexner's game and the closed-form stateless solution."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    times: np.ndarray   # (n,)
    K: np.ndarray       # (n, dx, dx)
    Phi: np.ndarray     # (n, dx, dx)
    d: np.ndarray       # (n,)

    def d_at(self, t):
        return np.interp(t, self.times, self.d)


def _rk4_backward(rhs, y_T, times):
    """Integrate y' = rhs(t, y) from times[-1] down to times[0] with classic RK4."""
    out = np.empty((len(times),) + y_T.shape)
    out[-1] = y_T
    y = y_T
    for n in range(len(times) - 1, 0, -1):
        t, h = times[n], times[n - 1] - times[n]   # h < 0
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[n - 1] = y
    return out


def riccati_integrate(A, B, R, K_T, z, times) -> RiccatiSolution:
    """K' = -A^T K - K A + K B R^-1 B^T K and Phi' = A Phi, both fixed at the final time."""
    A, B, R, K_T = (np.atleast_2d(np.asarray(m, float)) for m in (A, B, R, K_T))
    z = np.asarray(z, float).reshape(-1)
    times = np.asarray(times, float)
    if np.any(np.linalg.eigvalsh(0.5 * (R + R.T)) <= 0):
        raise ValueError("R must be positive definite")
    if np.any(np.linalg.eigvalsh(0.5 * (K_T + K_T.T)) < -1e-12):
        raise ValueError("terminal weight must be positive semidefinite")
    S = B @ np.linalg.solve(R, B.T)

    K = _rk4_backward(lambda t, K: -A.T @ K - K @ A + K @ S @ K, K_T, times)
    Phi = _rk4_backward(lambda t, P: A @ P, np.eye(A.shape[0]), times)
    w = np.einsum("nij,j->ni", Phi, z)
    Kw = np.einsum("nij,nj->ni", K, w)
    d = np.einsum("ni,ij,nj->n", Kw, S, Kw)
    return RiccatiSolution(times, K, Phi, d)


def critical_time(d1, d2, times) -> float:
    """Earliest minimizer of the cumulative integral of d1 - d2 (trapezoid rule)."""
    times = np.asarray(times, float)
    f = np.asarray(d1, float) - np.asarray(d2, float)
    F = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(times))])
    return float(times[int(np.argmin(F))])


# ----------------------------------------------------------------------------
# reduced football parameters: each player is a planar double integrator


def double_integrator_2d():
    A = np.zeros((4, 4))
    A[0, 2] = A[1, 3] = 1.0
    B = np.zeros((4, 2))
    B[2, 0] = B[3, 1] = 1.0
    return A, B


FOOTBALL = dict(R_A=np.diag([0.05, 0.025]), R_D=np.diag([0.05, 0.1]), horizon=1.0,
                position_weight=25.0 / 36.0, target=(0.0, 1.0))


def football_riccati(resolution: float = 1e-3, position_weight: Optional[float] = None,
                     R_A=None, R_D=None, horizon: Optional[float] = None):
    """Riccati solutions for the attacker (1) and defender (2)."""
    a = FOOTBALL["position_weight"] if position_weight is None else position_weight
    R_A = FOOTBALL["R_A"] if R_A is None else R_A
    R_D = FOOTBALL["R_D"] if R_D is None else R_D
    T = FOOTBALL["horizon"] if horizon is None else horizon
    n = int(round(T / resolution))
    times = np.linspace(0.0, T, n + 1)
    A, B = double_integrator_2d()
    K_T = np.diag([a, a, 0.0, 0.0])
    z = np.array([FOOTBALL["target"][0], FOOTBALL["target"][1], 0.0, 0.0])
    return (riccati_integrate(A, B, R_A, K_T, z, times),
            riccati_integrate(A, B, R_D, K_T, z, times))


def position_weight_d(s, r, a):
    """d for a unit target on a double-integrator axis, s = time to go (closed form)."""
    s = np.asarray(s, float)
    return s ** 2 * r / (r / a + s ** 3 / 3.0) ** 2


# ----------------------------------------------------------------------------
# stateless reformulation


class HexnerStateless:
    """Closed-form value, conjugate and strategies of the stateless game.

    The belief p is the probability of the type theta = -1.  d1 and d2 are
    callables of time; sign changes of d1 - d2 are located by bisection on
    the brackets of `times`.
    """

    def __init__(self, d1: Callable, d2: Callable, times):
        self.d1, self.d2 = d1, d2
        self.times = np.asarray(times, float)
        self.T = float(self.times[-1])
        f = self.f(self.times)
        roots = []
        for a, b, fa, fb in zip(self.times[:-1], self.times[1:], f[:-1], f[1:]):
            if fa == 0.0 and a > self.times[0]:
                roots.append(a)
            elif fa * fb < 0:
                roots.append(self._bisect(a, b))
        self.breaks = np.array([self.times[0], *sorted(set(roots)), self.T])
        D = [self._integral(a, b) for a, b in zip(self.breaks[:-1], self.breaks[1:])]
        self.D = np.array(D)
        Dt = np.zeros(len(self.breaks))
        for j in range(len(D) - 1, -1, -1):
            Dt[j] = min(0.0, Dt[j + 1] + D[j])
        self.D_tilde_breaks = Dt

    def f(self, t):
        return np.asarray(self.d1(t), float) - np.asarray(self.d2(t), float)

    def _integral(self, a, b):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            return quad(self.f, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]

    def _bisect(self, a, b):
        fa = float(self.f(a))
        tol = 1e-10 * self.T
        while b - a > tol:
            m = 0.5 * (a + b)
            fm = float(self.f(m))
            if fm == 0.0:
                return m
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        return 0.5 * (a + b)

    def D_tilde(self, t: float) -> float:
        """min over s >= t of the integral of d1 - d2 from t to s."""
        t = float(t)
        if t >= self.T:
            return 0.0
        j = int(np.searchsorted(self.breaks, t, side="right")) - 1
        j = min(max(j, 0), len(self.breaks) - 2)
        part = self._integral(t, self.breaks[j + 1])
        return min(0.0, part + self.D_tilde_breaks[j + 1])

    @property
    def reveal_time(self) -> float:
        """Earliest zero of D_tilde, i.e. the earliest minimizer of the cumulative integral."""
        j = int(np.flatnonzero(self.D_tilde_breaks == 0.0)[0])
        return float(self.breaks[j])

    def value(self, t: float, p: float) -> float:
        return 4.0 * p * (1.0 - p) * self.D_tilde(t)

    def conjugate(self, t: float, ph) -> float:
        a, b = float(ph[0]), float(ph[1])
        Dt = self.D_tilde(t)
        if Dt == 0.0:
            return max(a, b)
        s = a - b
        if s >= -4.0 * Dt:
            return a
        if s < 4.0 * Dt:
            return b
        return b - Dt * (1.0 - s / (4.0 * Dt)) ** 2

    def init_dual(self, p: float, t: float = 0.0) -> np.ndarray:
        Dt = self.D_tilde(t)
        return np.array([4.0 * (1.0 - p) ** 2 * Dt, 4.0 * p ** 2 * Dt])

    def strategy(self, t: float, p: float) -> dict:
        """Non-revealing play 1 - 2p while D_tilde < 0; full revelation afterwards."""
        if self.D_tilde(t) < 0:
            return {"reveal": False, "u": 1.0 - 2.0 * p, "v": 1.0 - 2.0 * p}
        return {"reveal": True, "posteriors": (0.0, 1.0), "weights": (1.0 - p, p),
                "u": (1.0, -1.0), "v": 1.0 - 2.0 * p}

    def discrete_D_tilde(self, steps: int) -> np.ndarray:
        """Semi-discrete recursion with the running payoff sampled at the left end of each step."""
        tau = self.T / steps
        out = np.zeros(steps + 1)
        for k in range(steps - 1, -1, -1):
            out[k] = min(0.0, out[k + 1] + tau * float(self.f(k * tau)))
        return out


def football_stateless(resolution: float = 2.5e-4, **kw) -> tuple:
    """(HexnerStateless, d1 callable, d2 callable) from the reduced football Riccati solutions."""
    s1, s2 = football_riccati(resolution, **kw)
    d1 = lambda t: np.interp(t, s1.times, s1.d)
    d2 = lambda t: np.interp(t, s2.times, s2.d)
    return HexnerStateless(d1, d2, s1.times), d1, d2
