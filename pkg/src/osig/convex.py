"""Lower convex hulls on 1-D and 2-D lattices, face queries and splits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

VERTEX_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HullFace:
    vertices: np.ndarray      # (m, dim)
    values: np.ndarray        # (m,)
    coef: np.ndarray          # value = coef[:-1] . point + coef[-1]

    def __call__(self, q):
        q = np.atleast_1d(np.asarray(q, float))
        return float(self.coef[:-1] @ q + self.coef[-1])


@dataclass(frozen=True, eq=False)
class SplitPlan:
    """Convex decomposition of a query point over hull vertices."""

    query: np.ndarray
    weights: np.ndarray       # (m,)
    points: np.ndarray        # (m, dim)
    indices: np.ndarray       # (m,) lattice indices of the vertices
    values: np.ndarray        # (m,) sample values at the vertices
    actions: Optional[list] = None
    extra: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.weights)

    def value(self) -> float:
        return float(self.weights @ self.values)


# ----------------------------------------------------------------------------
# 1-D


@dataclass(frozen=True, eq=False)
class Hull1D:
    x: np.ndarray          # vertex coordinates, increasing
    y: np.ndarray          # vertex values
    index: np.ndarray      # positions of the vertices in the input samples
    samples_x: np.ndarray
    samples_y: np.ndarray

    def __call__(self, q):
        return np.interp(q, self.x, self.y)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.y) / np.diff(self.x)

    def nodes(self) -> np.ndarray:
        """Envelope evaluated at every input coordinate."""
        return np.minimum(np.interp(self.samples_x, self.x, self.y), self.samples_y)

    def slope_at(self, q: float) -> float:
        """Slope of the segment containing q; the subgradient midpoint at a kink."""
        s = self.slopes
        if s.size == 0:
            return 0.0
        hit = np.flatnonzero(np.abs(self.x - q) <= VERTEX_TOL)
        if hit.size:
            j = int(hit[0])
            if j == 0:
                return float(s[0])
            if j == len(self.x) - 1:
                return float(s[-1])
            return 0.5 * float(s[j - 1] + s[j])
        j = int(np.searchsorted(self.x, q)) - 1
        return float(s[min(max(j, 0), s.size - 1)])

    @property
    def faces(self):
        out = []
        for a in range(len(self.x) - 1):
            sl = (self.y[a + 1] - self.y[a]) / (self.x[a + 1] - self.x[a])
            out.append(HullFace(self.x[a:a + 2, None], self.y[a:a + 2],
                                np.array([sl, self.y[a] - sl * self.x[a]])))
        return out

    def split(self, q) -> SplitPlan:
        q = float(np.asarray(q, float).reshape(-1)[0])
        lo, hi = self.x[0], self.x[-1]
        if q < lo - VERTEX_TOL or q > hi + VERTEX_TOL:
            raise ValueError(f"query {q} outside the hull domain [{lo}, {hi}]")
        q = min(max(q, lo), hi)
        hit = np.flatnonzero(np.abs(self.x - q) <= VERTEX_TOL)
        if hit.size:
            j = hit[:1]
            return SplitPlan(np.array([q]), np.ones(1), self.x[j, None], self.index[j], self.y[j])
        b = int(np.searchsorted(self.x, q))
        a = b - 1
        wb = (q - self.x[a]) / (self.x[b] - self.x[a])
        j = np.array([a, b])
        return SplitPlan(np.array([q]), np.array([1.0 - wb, wb]), self.x[j, None],
                         self.index[j], self.y[j])


def lower_hull_1d(coords, values=None, rel_tol: float = 1e-12) -> Hull1D:
    """Lower convex hull of 1-D samples by Andrew's monotone chain.

    `coords` may also be an (n, 2) array of (coordinate, value) pairs.
    """
    if values is None:
        arr = np.asarray(coords, dtype=float)
        x, y = arr[:, 0], arr[:, 1]
    else:
        x = np.asarray(coords, dtype=float).reshape(-1)
        y = np.asarray(values, dtype=float).reshape(-1)
    if x.size < 2 or x.size != y.size:
        raise ValueError("need at least two samples with matching values")
    d = np.diff(x)
    if np.any(d == 0):
        raise ValueError("duplicate coordinates")
    if np.any(d < 0):
        raise ValueError("coordinates must be strictly increasing")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite samples")
    tol = rel_tol * (x[-1] - x[0]) * max(1.0, float(np.max(np.abs(y))))
    keep: list = []
    for i in range(x.size):
        while len(keep) >= 2:
            o, a = keep[-2], keep[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (x[i] - x[o]) * (y[a] - y[o])
            if cross <= tol:
                keep.pop()
            else:
                break
        keep.append(i)
    idx = np.array(keep, dtype=int)
    return Hull1D(x[idx], y[idx], idx, x, y)


# ----------------------------------------------------------------------------
# 2-D


@dataclass(frozen=True, eq=False)
class Hull2D:
    axes: tuple                # the two lattice axes
    points: np.ndarray         # (n, 2) lattice nodes, row-major
    samples: np.ndarray        # (n,) sample values
    triangles: np.ndarray      # (f, 3) node indices of the lower faces
    planes: np.ndarray         # (f, 3): value = a x + b y + c
    _bary: np.ndarray          # (f, 3, 3) maps (x, y, 1) to barycentric weights

    def __call__(self, q):
        q = np.atleast_2d(np.asarray(q, float))
        out = np.max(q @ self.planes[:, :2].T + self.planes[:, 2], axis=1)
        return out if out.size > 1 else float(out[0])

    def nodes(self, chunk: int = 4096) -> np.ndarray:
        """Envelope at every lattice node (never above the samples)."""
        out = self.samples.copy()
        rest = np.setdiff1d(np.arange(len(self.points)), self.vertex_index)
        A, c = self.planes[:, :2].T, self.planes[:, 2]
        for s in range(0, rest.size, chunk):
            r = rest[s:s + chunk]
            out[r] = np.max(self.points[r] @ A + c, axis=1)
        return np.minimum(out, self.samples)

    @property
    def vertex_index(self) -> np.ndarray:
        return np.unique(self.triangles)

    @property
    def faces(self):
        return [HullFace(self.points[t], self.samples[t], self.planes[f])
                for f, t in enumerate(self.triangles)]

    def split(self, q) -> SplitPlan:
        q = np.asarray(q, float).reshape(2)
        lo = np.array([self.axes[0][0], self.axes[1][0]])
        hi = np.array([self.axes[0][-1], self.axes[1][-1]])
        span = hi - lo
        if np.any(q < lo - VERTEX_TOL * span) or np.any(q > hi + VERTEX_TOL * span):
            raise ValueError(f"query {q} outside the hull domain")
        q = np.clip(q, lo, hi)
        lam = self._bary @ np.array([q[0], q[1], 1.0])            # (f, 3)
        inside = np.flatnonzero(np.all(lam >= -1e-10, axis=1))
        if inside.size == 0:
            # round-off on the boundary: take the face with the least violation
            inside = np.array([int(np.argmax(np.min(lam, axis=1)))])
        best, best_key = None, None
        for f in inside:
            key = tuple(sorted(tuple(self.points[v]) for v in self.triangles[f]))
            if best_key is None or key < best_key:
                best, best_key = f, key
        w = np.clip(lam[best], 0.0, None)
        tri = self.triangles[best]
        keep = w > 1e-10
        w, tri = w[keep] / w[keep].sum(), tri[keep]
        order = np.lexsort((self.points[tri][:, 1], self.points[tri][:, 0]))
        w, tri = w[order], tri[order]
        return SplitPlan(q, w, self.points[tri], tri, self.samples[tri])


def lower_hull_2d(axis0, axis1, values) -> Hull2D:
    """Lower convex envelope of samples on a rectangular lattice.

    Lifts the nodes to 3-D, adds a roof above the box so that flat or
    degenerate data still produce a solid hull, and keeps the facets whose
    outward normal points down.
    """
    a0 = np.asarray(axis0, dtype=float).reshape(-1)
    a1 = np.asarray(axis1, dtype=float).reshape(-1)
    z = np.asarray(values, dtype=float)
    if a0.size < 2 or a1.size < 2:
        raise ValueError("need at least a 2x2 lattice")
    if np.any(np.diff(a0) <= 0) or np.any(np.diff(a1) <= 0):
        raise ValueError("lattice axes must be strictly increasing")
    if z.shape != (a0.size, a1.size):
        raise ValueError(f"values of shape {z.shape} do not match a {a0.size}x{a1.size} lattice")
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite samples")
    X, Y = np.meshgrid(a0, a1, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    zs = z.ravel()
    n = zs.size

    lo, span = pts.min(axis=0), np.ptp(pts, axis=0)
    zlo, zspan = zs.min(), np.ptp(zs)
    zspan = zspan if zspan > 0 else 1.0
    u = (pts - lo) / span
    w = (zs - zlo) / zspan
    roof = np.array([[0, 0, 3.0], [1, 0, 3.0], [0, 1, 3.0], [1, 1, 3.0]])
    lifted = np.vstack([np.column_stack([u, w]), roof])
    hull = ConvexHull(lifted)

    eq = hull.equations
    down = (eq[:, 2] < -1e-9 * np.linalg.norm(eq[:, :3], axis=1)) & np.all(hull.simplices < n, axis=1)
    tris = hull.simplices[down]
    M = np.concatenate([pts[tris], np.ones(tris.shape + (1,))], axis=2)   # (f, 3, 3)
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-12 * span[0] * span[1]   # drop collapsed triangles of flat facets
    tris, M = tris[ok], M[ok]
    if not len(tris):
        raise RuntimeError("lower hull extraction found no faces")
    planes = np.linalg.solve(M, zs[tris][..., None])[..., 0]
    bary = np.transpose(np.linalg.inv(M), (0, 2, 1))
    return Hull2D((a0, a1), pts, zs, tris.astype(int), planes, bary)


# ----------------------------------------------------------------------------


def split_at(hull, query) -> SplitPlan:
    """Face containing `query` and the barycentric weights of its vertices."""
    return hull.split(query)


def vex_error_bound(d_P: float, L: float) -> float:
    """Worst-case convexification error 2 d_P L on a lattice of spacing d_P."""
    if not d_P > 0 or L < 0:
        raise ValueError("need d_P > 0 and L >= 0")
    return 2.0 * d_P * L


def second_differences(v: np.ndarray, axis: int = -1) -> np.ndarray:
    v = np.moveaxis(np.asarray(v, float), axis, -1)
    return v[..., 2:] - 2 * v[..., 1:-1] + v[..., :-2]
