"""Polyhedral and quadratically-cut parameter sets.

A parameter region is either a plain polyhedron {theta : At @ theta <= bt}
or a polyhedron intersected with quadratic cuts {theta : theta'Q theta +
R theta + S <= 0}.  Emptiness of the affine part is decided by a Chebyshev
feasibility LP on normalized rows; quadratic cuts fall back to a global
search for a feasible point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

FEAS_TOL = 1e-8         # feasibility/emptiness tolerance on normalized rows
MIN_RADIUS = 1e-9       # pieces with Chebyshev radius below this are "empty interior"
RADIUS_CAP = 1e6        # keeps the Chebyshev LP bounded on unbounded polyhedra
ZERO_ROW = 1e-12


class GeometryError(ValueError):
    pass


def _as_matrix(At, n_theta=None):
    At = np.atleast_2d(np.asarray(At, dtype=float))
    if At.size == 0:
        At = At.reshape(0, n_theta if n_theta else 1)
    return At


@dataclass(frozen=True)
class Polyhedron:
    """{theta : At @ theta <= bt}."""

    At: np.ndarray
    bt: np.ndarray

    def __post_init__(self):
        At = _as_matrix(self.At)
        bt = np.atleast_1d(np.asarray(self.bt, dtype=float))
        if At.shape[0] != bt.shape[0]:
            raise GeometryError("row count of At must equal length of bt")
        if At.shape[1] < 1:
            raise GeometryError("parameter dimension must be at least 1")
        object.__setattr__(self, "At", At)
        object.__setattr__(self, "bt", bt)

    @property
    def n_theta(self) -> int:
        return self.At.shape[1]

    @property
    def n_rows(self) -> int:
        return self.At.shape[0]

    def contains(self, theta, tol=FEAS_TOL) -> bool:
        theta = np.asarray(theta, dtype=float)
        norms = np.maximum(np.linalg.norm(self.At, axis=1), 1.0)
        return bool(np.all(self.At @ theta - self.bt <= tol * norms))

    def to_json(self) -> dict:
        return {"At": self.At.tolist(), "bt": self.bt.tolist()}

    @staticmethod
    def from_json(obj) -> "Polyhedron":
        return Polyhedron(np.asarray(obj["At"], dtype=float),
                          np.asarray(obj["bt"], dtype=float))

    @staticmethod
    def box(lower, upper) -> "Polyhedron":
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        n = lower.shape[0]
        eye = np.eye(n)
        return Polyhedron(np.vstack([eye, -eye]), np.concatenate([upper, -lower]))


@dataclass(frozen=True)
class QuadCut:
    """{theta : theta' Q theta + R theta + S <= 0}."""

    Q: np.ndarray
    R: np.ndarray
    S: float

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_1d(np.asarray(self.R, dtype=float)).reshape(-1)
        if Q.shape[0] != Q.shape[1] or Q.shape[0] != R.shape[0]:
            raise GeometryError("QuadCut dimensions inconsistent")
        if np.max(np.abs(Q - Q.T)) > 1e-10:
            raise GeometryError("QuadCut Q not symmetric")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "S", float(self.S))

    def value(self, theta):
        theta = np.asarray(theta, dtype=float)
        return float(theta @ self.Q @ theta + self.R @ theta + self.S)

    def to_json(self) -> dict:
        return {"Q": self.Q.tolist(), "R": self.R.tolist(), "S": self.S}

    @staticmethod
    def from_json(obj) -> "QuadCut":
        return QuadCut(np.asarray(obj["Q"], dtype=float),
                       np.asarray(obj["R"], dtype=float), float(obj["S"]))


@dataclass(frozen=True)
class RegionSet:
    """Polyhedron intersected with an ordered list of quadratic cuts."""

    poly: Polyhedron
    quads: tuple = field(default_factory=tuple)

    @property
    def n_theta(self) -> int:
        return self.poly.n_theta

    def contains(self, theta, tol=FEAS_TOL) -> bool:
        if not self.poly.contains(theta, tol):
            return False
        return all(q.value(theta) <= tol * max(1.0, float(np.linalg.norm(q.Q)) +
                                               float(np.linalg.norm(q.R)))
                   for q in self.quads)

    def to_json(self) -> dict:
        obj = self.poly.to_json()
        if self.quads:
            obj["quads"] = [q.to_json() for q in self.quads]
        return obj

    @staticmethod
    def from_json(obj) -> "RegionSet":
        quads = tuple(QuadCut.from_json(q) for q in obj.get("quads", []))
        return RegionSet(Polyhedron.from_json(obj), quads)


def intersect_halfspace(P: Polyhedron, a, b) -> Polyhedron:
    """Return {theta in P : a @ theta <= b}; the new row is always appended."""
    a = np.atleast_1d(np.asarray(a, dtype=float)).reshape(-1)
    if a.shape[0] != P.n_theta:
        raise GeometryError("halfspace dimension mismatch")
    return Polyhedron(np.vstack([P.At, a[None, :]]),
                      np.concatenate([P.bt, [float(b)]]))


def _normalized_rows(P: Polyhedron):
    """Split rows into (normalized non-zero rows, worst zero-row rhs)."""
    norms = np.linalg.norm(P.At, axis=1)
    zero = norms <= ZERO_ROW
    worst_zero = float(np.min(P.bt[zero])) if np.any(zero) else np.inf
    keep = ~zero
    At = P.At[keep] / norms[keep, None] if np.any(keep) else P.At[:0]
    bt = P.bt[keep] / norms[keep] if np.any(keep) else P.bt[:0]
    return At, bt, worst_zero


def chebyshev(P: Polyhedron):
    """Center and radius of a largest inscribed ball.

    The radius is allowed to go negative, which doubles as an emptiness
    measure: radius < -FEAS_TOL means the polyhedron is empty.
    """
    At, bt, worst_zero = _normalized_rows(P)
    n = P.n_theta
    if worst_zero < -FEAS_TOL:
        return np.zeros(n), -np.inf
    if At.shape[0] == 0:
        return np.zeros(n), RADIUS_CAP
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([At, np.ones((At.shape[0], 1))])
    bounds = [(None, None)] * n + [(None, RADIUS_CAP)]
    res = linprog(c, A_ub=A_ub, b_ub=bt, bounds=bounds, method="highs")
    if res.status == 2:  # infeasible cannot happen with free radius
        return np.zeros(n), -np.inf
    if not res.success:
        raise GeometryError(f"chebyshev LP failed: {res.message}")
    return res.x[:n].copy(), float(res.x[n])


def chebyshev_center(P: Polyhedron):
    """(center, radius) of a largest inscribed ball; error on empty input."""
    center, radius = chebyshev(P)
    if radius < -FEAS_TOL:
        raise GeometryError("empty region")
    return center, max(radius, 0.0)


def is_empty(P) -> bool:
    """True iff the set has no point (tolerance FEAS_TOL on normalized rows)."""
    if isinstance(P, Polyhedron):
        P = RegionSet(P)
    if not P.quads:
        _, radius = chebyshev(P.poly)
        return radius < -FEAS_TOL
    return find_point(P) is None


def find_point(rs: RegionSet):
    """Search deterministically for a point satisfying poly and all quad cuts.

    Returns None when no point is found; exact for the affine-only case,
    a (grid + local polish) global search otherwise.
    """
    center, radius = chebyshev(rs.poly)
    if radius < -FEAS_TOL:
        return None
    if not rs.quads:
        return center

    def quad_violation(theta):
        return max(q.value(theta) for q in rs.quads)

    tol = FEAS_TOL * 10.0
    if quad_violation(center) <= tol:
        return center

    # single-cut minimizers often satisfy the remaining cuts
    from .quadcmp import quad_min_region  # lazy: avoids an import cycle

    candidates = []
    try:
        for q in rs.quads:
            val, arg = quad_min_region(q.Q, q.R, q.S, rs.poly)
            if val <= tol:
                candidates.append(arg)
    except GeometryError:
        pass
    for cand in candidates:
        if quad_violation(cand) <= tol and rs.poly.contains(cand):
            return cand

    try:
        box = bounding_box(rs.poly)
    except GeometryError:
        return candidates[0] if candidates else None
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    n = rs.n_theta
    per_axis = {1: 201, 2: 41, 3: 17}.get(n, 9)
    axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(n)]
    mesh = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    norms = np.maximum(np.linalg.norm(rs.poly.At, axis=1), 1.0)
    inside = np.all(rs.poly.At @ mesh.T - rs.poly.bt[:, None]
                    <= FEAS_TOL * norms[:, None], axis=0)
    mesh = mesh[inside]
    if mesh.shape[0]:
        viol = np.zeros(mesh.shape[0])
        for q in rs.quads:
            vals = np.einsum("ij,jk,ik->i", mesh, q.Q, mesh) + mesh @ q.R + q.S
            viol = np.maximum(viol, vals)
        best = int(np.argmin(viol))
        if viol[best] <= tol:
            return mesh[best]
        start = mesh[best]
    else:
        start = center

    polished = _polish_point(rs, start)
    if polished is not None and quad_violation(polished) <= tol \
            and rs.poly.contains(polished):
        return polished
    return None


def _polish_point(rs: RegionSet, start):
    from scipy.optimize import minimize

    def objective(theta):
        return sum(max(q.value(theta), 0.0) ** 2 for q in rs.quads)

    cons = [{"type": "ineq",
             "fun": lambda th, i=i: rs.poly.bt[i] - rs.poly.At[i] @ th}
            for i in range(rs.poly.n_rows)]
    try:
        res = minimize(objective, start, method="SLSQP", constraints=cons,
                       options={"maxiter": 200, "ftol": 1e-14})
    except Exception:
        return None
    return res.x if res.success else None


def bounding_box(P: Polyhedron):
    """Tight per-coordinate bounds via 2 * n_theta support LPs."""
    n = P.n_theta
    At, bt, worst_zero = _normalized_rows(P)
    if worst_zero < -FEAS_TOL:
        raise GeometryError("empty region")
    out = []
    for i in range(n):
        vals = []
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = sign
            res = linprog(c, A_ub=At, b_ub=bt, bounds=[(None, None)] * n,
                          method="highs")
            if res.status == 3:
                raise GeometryError("unbounded region")
            if res.status == 2:
                raise GeometryError("empty region")
            if not res.success:
                raise GeometryError(f"support LP failed: {res.message}")
            vals.append(sign * res.fun)
        out.append((vals[0], vals[1]))
    return out
