"""Problem data model, JSON ingestion, random instance generation, and a
condensation helper for predictive-control problems.

A parametric mixed-integer problem is

    minimize    c'x                         (linear objective)
    or          0.5 x'Hx + f'x + theta'f_theta'x   (quadratic objective)
    subject to  A x <= b + W theta,
                x_i in {0, 1} for the binary indices,

with theta restricted to a bounded polyhedron theta0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ProblemFormatError
from .geometry import Polyhedron

H_REGULARIZATION = 1e-6


@dataclass(frozen=True)
class MpProblem:
    kind: str                      # "milp" | "miqp"
    n_c: int
    n_b: int
    binary_indices: tuple
    A: np.ndarray                  # (m, n)
    b: np.ndarray                  # (m,)
    W: np.ndarray                  # (m, n_theta)
    theta0: Polyhedron
    H: np.ndarray | None = None    # (n, n), MIQP only
    f: np.ndarray | None = None    # (n,), MIQP only
    f_theta: np.ndarray | None = None  # (n, n_theta), MIQP only
    c: np.ndarray | None = None    # (n,), MILP only
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        W = np.atleast_2d(np.asarray(self.W, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "binary_indices",
                           tuple(int(i) for i in self.binary_indices))
        n = self.n_c + self.n_b
        if A.shape != (b.shape[0], n):
            raise ProblemFormatError("/A: shape inconsistent with n_c + n_b and b")
        if W.shape != (b.shape[0], self.theta0.n_theta):
            raise ProblemFormatError("/W: shape inconsistent with b and theta0")
        if len(self.binary_indices) != self.n_b:
            raise ProblemFormatError("/binary_indices: count must equal n_b")
        if sorted(set(self.binary_indices)) != sorted(self.binary_indices):
            raise ProblemFormatError("/binary_indices: duplicates")
        if any(i < 0 or i >= n for i in self.binary_indices):
            raise ProblemFormatError("/binary_indices: out of range")
        if self.kind not in ("milp", "miqp"):
            raise ProblemFormatError("/kind: must be 'milp' or 'miqp'")
        if self.kind == "miqp":
            if self.H is None:
                raise ProblemFormatError("/H: required for miqp")
            H = np.atleast_2d(np.asarray(self.H, dtype=float))
            if H.shape != (n, n):
                raise ProblemFormatError("/H: must be n x n")
            if np.max(np.abs(H - H.T)) > 1e-10:
                raise ProblemFormatError("/H: H not symmetric")
            f = np.zeros(n) if self.f is None else np.asarray(self.f, dtype=float)
            f_theta = (np.zeros((n, self.n_theta)) if self.f_theta is None
                       else np.atleast_2d(np.asarray(self.f_theta, dtype=float)))
            if f.shape != (n,):
                raise ProblemFormatError("/f: must have length n")
            if f_theta.shape != (n, self.n_theta):
                raise ProblemFormatError("/f_theta: must be n x n_theta")
            object.__setattr__(self, "H", H)
            object.__setattr__(self, "f", f)
            object.__setattr__(self, "f_theta", f_theta)
            object.__setattr__(self, "c", None)
        else:
            if self.H is not None:
                raise ProblemFormatError("/H: must be null for milp")
            if self.c is None:
                raise ProblemFormatError("/c: required for milp")
            c = np.asarray(self.c, dtype=float)
            if c.shape != (n,):
                raise ProblemFormatError("/c: must have length n")
            object.__setattr__(self, "c", c)
            object.__setattr__(self, "f", None)
            object.__setattr__(self, "f_theta", None)

    @property
    def n(self) -> int:
        return self.n_c + self.n_b

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def n_theta(self) -> int:
        return self.theta0.n_theta

    @property
    def is_qp(self) -> bool:
        return self.kind == "miqp"

    def cost_linear(self, theta):
        """Linear cost term at a fixed theta."""
        if self.is_qp:
            return self.f + self.f_theta @ np.asarray(theta, dtype=float)
        return self.c

    def rhs(self, theta):
        return self.b + self.W @ np.asarray(theta, dtype=float)

    def with_rows(self, A_new, b_new, W_new) -> "MpProblem":
        """Problem with extra constraint rows appended (heuristic subproblems)."""
        return MpProblem(
            kind=self.kind, n_c=self.n_c, n_b=self.n_b,
            binary_indices=self.binary_indices,
            A=np.vstack([self.A, np.atleast_2d(A_new)]),
            b=np.concatenate([self.b, np.atleast_1d(b_new)]),
            W=np.vstack([self.W, np.atleast_2d(W_new)]),
            theta0=self.theta0, H=self.H, f=self.f, f_theta=self.f_theta,
            c=self.c, metadata=dict(self.metadata))

    def to_json(self) -> dict:
        def arr(x):
            return None if x is None else x.tolist()
        return {
            "kind": self.kind, "n_c": self.n_c, "n_b": self.n_b,
            "binary_indices": list(self.binary_indices),
            "H": arr(self.H), "f": arr(self.f), "f_theta": arr(self.f_theta),
            "c": arr(self.c), "A": self.A.tolist(), "b": self.b.tolist(),
            "W": self.W.tolist(), "theta0": self.theta0.to_json(),
            "metadata": self.metadata,
        }

    @staticmethod
    def from_json(obj: dict) -> "MpProblem":
        for key in ("kind", "n_c", "n_b", "binary_indices", "A", "b", "W",
                    "theta0"):
            if key not in obj:
                raise ProblemFormatError(f"/{key}: missing")
        theta0 = Polyhedron.from_json(obj["theta0"])

        def arr(key):
            return None if obj.get(key) is None else np.asarray(obj[key], float)
        return MpProblem(
            kind=obj["kind"], n_c=int(obj["n_c"]), n_b=int(obj["n_b"]),
            binary_indices=tuple(obj["binary_indices"]),
            A=np.asarray(obj["A"], float), b=np.asarray(obj["b"], float),
            W=np.asarray(obj["W"], float), theta0=theta0,
            H=arr("H"), f=arr("f"), f_theta=arr("f_theta"), c=arr("c"),
            metadata=obj.get("metadata", {}))


def save_problem(problem: MpProblem, path):
    with open(path, "w") as fh:
        json.dump(problem.to_json(), fh, indent=1)


def load_problem(path) -> MpProblem:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"/: not valid JSON ({exc})") from exc
    return MpProblem.from_json(obj)


def random_instance(kind, n_b, n_c, m, n_theta, seed) -> MpProblem:
    """Random instance following the reference protocol: Gram-matrix H,
    standard-normal cost/constraint data, b uniform on [0, 2], and a
    +-0.5 box parameter set.

    Draw order from a counter-based Philox stream (fixed for reproducibility):
    Hbar (miqp only), f, c, f_theta, A, b, W.  Both f and c are always drawn
    so that both kinds share the constraint geometry for a given seed; only
    the kind-relevant objective fields are stored.  Binary variables occupy
    the last n_b indices.
    """
    if min(n_b, n_c, m, n_theta) < 1:
        raise ProblemFormatError("sizes must be >= 1")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    n = n_b + n_c
    H = None
    metadata = {}
    if kind == "miqp":
        Hbar = rng.standard_normal((n, n))
        H = Hbar @ Hbar.T + H_REGULARIZATION * np.eye(n)
        metadata["h_regularization"] = H_REGULARIZATION
    f = rng.standard_normal(n)
    c = rng.standard_normal(n)
    f_theta = rng.standard_normal((n, n_theta))
    A = rng.standard_normal((m, n))
    b = rng.uniform(0.0, 2.0, size=m)
    W = rng.standard_normal((m, n_theta))
    theta0 = Polyhedron.box(-0.5 * np.ones(n_theta), 0.5 * np.ones(n_theta))
    binaries = tuple(range(n_c, n))
    if kind == "miqp":
        return MpProblem(kind="miqp", n_c=n_c, n_b=n_b, binary_indices=binaries,
                         A=A, b=b, W=W, theta0=theta0, H=H, f=f,
                         f_theta=f_theta, metadata=metadata)
    return MpProblem(kind="milp", n_c=n_c, n_b=n_b, binary_indices=binaries,
                     A=A, b=b, W=W, theta0=theta0, c=c, metadata=metadata)


def mpc_condense(A_dyn, B_dyn, Q_w, R_w, horizon, x_bounds, u_bounds,
                 binary_inputs=()) -> MpProblem:
    """Condense a linear-dynamics control problem over `horizon` steps into a
    parametric QP in the stacked inputs, with theta = initial state.

    x_bounds / u_bounds: (lower, upper) arrays; binary_inputs: indices of
    inputs that are 0/1 decisions at every step (no bound rows are added for
    them; their integrality is carried by the binary index set).
    """
    A_dyn = np.atleast_2d(np.asarray(A_dyn, float))
    B_dyn = np.atleast_2d(np.asarray(B_dyn, float))
    Q_w = np.atleast_2d(np.asarray(Q_w, float))
    R_w = np.atleast_2d(np.asarray(R_w, float))
    nx, nu = B_dyn.shape
    if A_dyn.shape != (nx, nx) or Q_w.shape != (nx, nx) or R_w.shape != (nu, nu):
        raise ProblemFormatError("dimension mismatch in dynamics or weights")
    N = int(horizon)
    x_lo, x_hi = (np.asarray(v, float) for v in x_bounds)
    u_lo, u_hi = (np.asarray(v, float) for v in u_bounds)
    if np.any(x_hi < x_lo) or np.any(u_hi < u_lo):
        raise ProblemFormatError("infeasible bounds: upper < lower")

    # prediction matrices: x_k = A^k theta + sum_{i<k} A^(k-1-i) B u_i
    powers = [np.eye(nx)]
    for _ in range(N):
        powers.append(A_dyn @ powers[-1])
    Sx = np.vstack([powers[k] for k in range(1, N + 1)])
    Su = np.zeros((N * nx, N * nu))
    for k in range(1, N + 1):
        for i in range(k):
            Su[(k - 1) * nx:k * nx, i * nu:(i + 1) * nu] = \
                powers[k - 1 - i] @ B_dyn
    Qbar = np.kron(np.eye(N), Q_w)
    Rbar = np.kron(np.eye(N), R_w)

    H = 2.0 * (Su.T @ Qbar @ Su + Rbar)
    H = 0.5 * (H + H.T)
    f_theta = 2.0 * Su.T @ Qbar @ Sx
    f = np.zeros(N * nu)

    binary_set = set(int(j) for j in binary_inputs)
    cont = [j for j in range(nu) if j not in binary_set]
    rows_A, rows_b, rows_W = [], [], []
    # input bounds for continuous inputs
    for k in range(N):
        for j in cont:
            e = np.zeros(N * nu)
            e[k * nu + j] = 1.0
            rows_A += [e, -e]
            rows_b += [u_hi[j], -u_lo[j]]
            rows_W += [np.zeros(nx), np.zeros(nx)]
    # predicted state bounds
    for k in range(1, N + 1):
        rows_su = Su[(k - 1) * nx:k * nx]
        rows_sx = powers[k]
        for j in range(nx):
            rows_A += [rows_su[j], -rows_su[j]]
            rows_b += [x_hi[j], -x_lo[j]]
            rows_W += [-rows_sx[j], rows_sx[j]]

    binaries = tuple(sorted(k * nu + j for k in range(N) for j in binary_set))
    n = N * nu
    n_b = len(binaries)
    theta0 = Polyhedron.box(x_lo, x_hi)
    # reindex so binaries are an index set over the natural stacked ordering
    return MpProblem(kind="miqp", n_c=n - n_b, n_b=n_b,
                     binary_indices=binaries,
                     A=np.vstack(rows_A), b=np.asarray(rows_b, float),
                     W=np.vstack(rows_W), theta0=theta0, H=H, f=f,
                     f_theta=f_theta)
