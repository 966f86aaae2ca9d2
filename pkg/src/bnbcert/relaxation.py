"""Node relaxations: fixing binaries, box rows, and the online solve wrapper.

Row identities are stable across the tree ("gids"): original constraint row
r keeps id r; the lower box row of the binary with rank j (position in the
sorted binary index list) has id m + j and the upper box row id m + n_b + j.
Local row ordering inside a relaxation is ascending in gid, which matches
the construction order: original rows, then lower box rows, then upper box
rows.  Tie-breaking by "lowest row index" is therefore identical whether
done on local indices or gids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SolverError
from .problems import MpProblem

QP_MAX_ITER_BASE = 1000


@dataclass(frozen=True)
class Relaxation:
    """Assembled relaxation for one node of the tree."""

    problem: MpProblem
    zeros: tuple
    ones: tuple
    free_idx: np.ndarray        # global variable index per local column
    relaxed: tuple              # global indices of still-relaxed binaries
    A: np.ndarray               # (m_rows, n_free)
    b0: np.ndarray              # (m_rows,)
    Wt: np.ndarray              # (m_rows, n_theta)
    row_gids: np.ndarray        # (m_rows,)
    lin0: np.ndarray            # linear cost: lin0 + linT @ theta
    linT: np.ndarray
    H: np.ndarray | None
    off0: float                 # objective offset from fixed variables
    offT: np.ndarray

    @property
    def n_free(self) -> int:
        return self.free_idx.shape[0]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def rhs(self, theta):
        return self.b0 + self.Wt @ np.asarray(theta, dtype=float)

    def gid_box_low(self, var: int) -> int:
        rank = self.problem.binary_indices.index(var)
        return self.problem.m + rank

    def gid_box_up(self, var: int) -> int:
        rank = self.problem.binary_indices.index(var)
        return self.problem.m + self.problem.n_b + rank

    def local_col(self, var: int) -> int:
        return int(np.searchsorted(self.free_idx, var))

    def full_x(self, x_free, active_gids=()):
        """Embed the free solution into the full variable vector, snapping
        relaxed binaries whose box row is in the working set."""
        problem = self.problem
        x = np.zeros(problem.n)
        for v in self.ones:
            x[v] = 1.0
        x[self.free_idx] = x_free
        active = set(int(g) for g in active_gids)
        for v in self.relaxed:
            if self.gid_box_low(v) in active or self.gid_box_up(v) in active:
                x[v] = float(round(x[v]))
        return x


@dataclass(frozen=True)
class RelaxResult:
    status: str                 # "optimal" | "infeasible"
    x: np.ndarray | None        # full-length solution
    J: float
    active_set: tuple           # sorted gids of the final working set
    iterations: int
    x_free: np.ndarray | None = None


@dataclass(frozen=True)
class RelaxationSpec:
    problem: MpProblem
    node: object                # anything with .zeros / .ones
    theta: np.ndarray
    warm_start: tuple | None = None


def build_relaxation(problem: MpProblem, zeros, ones) -> Relaxation:
    zeros = tuple(sorted(int(v) for v in zeros))
    ones = tuple(sorted(int(v) for v in ones))
    bset = set(problem.binary_indices)
    if set(zeros) & set(ones):
        raise ValueError("fixed-to-0 and fixed-to-1 sets must be disjoint")
    if not (set(zeros) <= bset and set(ones) <= bset):
        raise ValueError("fixings must index binary variables")
    fixed = set(zeros) | set(ones)
    free_idx = np.array([v for v in range(problem.n) if v not in fixed],
                        dtype=np.int64)
    relaxed = tuple(v for v in problem.binary_indices if v not in fixed)

    A_free = problem.A[:, free_idx]
    b0 = problem.b.copy()
    for v in ones:
        b0 = b0 - problem.A[:, v]
    Wt = problem.W
    m = problem.m
    n_b = problem.n_b
    nf = free_idx.shape[0]
    n_theta = problem.n_theta

    rows_A = [A_free]
    rows_b = [b0]
    rows_W = [Wt]
    gids = list(range(m))
    col_of = {int(v): j for j, v in enumerate(free_idx)}
    for v in relaxed:
        e = np.zeros(nf)
        e[col_of[v]] = -1.0
        rows_A.append(e[None, :])
        rows_b.append(np.zeros(1))
        rows_W.append(np.zeros((1, n_theta)))
        gids.append(m + problem.binary_indices.index(v))
    for v in relaxed:
        e = np.zeros(nf)
        e[col_of[v]] = 1.0
        rows_A.append(e[None, :])
        rows_b.append(np.ones(1))
        rows_W.append(np.zeros((1, n_theta)))
        gids.append(m + n_b + problem.binary_indices.index(v))

    A_loc = np.vstack(rows_A) if nf else np.zeros((m, 0))
    if nf == 0:
        b_loc = b0
        W_loc = Wt
        gids = list(range(m))
    else:
        b_loc = np.concatenate(rows_b)
        W_loc = np.vstack(rows_W)

    ones_arr = np.array(ones, dtype=np.int64)
    if problem.is_qp:
        H_loc = problem.H[np.ix_(free_idx, free_idx)]
        lin0 = problem.f[free_idx].copy()
        if ones_arr.size:
            lin0 = lin0 + problem.H[np.ix_(free_idx, ones_arr)].sum(axis=1)
        linT = problem.f_theta[free_idx]
        off0 = 0.0
        offT = np.zeros(n_theta)
        if ones_arr.size:
            off0 = 0.5 * float(problem.H[np.ix_(ones_arr, ones_arr)].sum()) \
                + float(problem.f[ones_arr].sum())
            offT = problem.f_theta[ones_arr].sum(axis=0)
    else:
        H_loc = None
        lin0 = problem.c[free_idx].copy()
        linT = np.zeros((nf, n_theta))
        off0 = float(problem.c[ones_arr].sum()) if ones_arr.size else 0.0
        offT = np.zeros(n_theta)

    return Relaxation(problem=problem, zeros=zeros, ones=ones,
                      free_idx=free_idx, relaxed=relaxed, A=A_loc, b0=b_loc,
                      Wt=W_loc, row_gids=np.array(gids, dtype=np.int64),
                      lin0=lin0, linT=linT, H=H_loc, off0=off0, offT=offT)


def check_strictly_convex(problem: MpProblem):
    if not problem.is_qp:
        return
    try:
        np.linalg.cholesky(problem.H)
    except np.linalg.LinAlgError:
        raise SolverError(
            "H must be strictly positive definite for the QP engine")


def filter_warm_set(relax: Relaxation, warm_gids) -> np.ndarray:
    """Map a parent working set onto this relaxation, dropping rows that no
    longer exist or have become linearly dependent (ascending-gid greedy)."""
    if not warm_gids:
        return np.empty(0, dtype=np.int64)
    gid_to_local = {int(g): i for i, g in enumerate(relax.row_gids)}
    keep = []
    for gid in sorted(int(g) for g in warm_gids):
        loc = gid_to_local.get(gid)
        if loc is None:
            continue
        if len(keep) >= relax.n_free:
            break
        if keep:
            dependent, _ = kernels.qp_dependence(
                relax.A, np.array(keep, dtype=np.int64), loc)
            if dependent:
                continue
        elif np.linalg.norm(relax.A[loc]) <= 1e-12:
            continue
        keep.append(loc)
    return np.array(keep, dtype=np.int64)


def _raise_for_status(status: int):
    if status == kernels.STATUS_UNBOUNDED:
        raise SolverError("unbounded relaxation")
    if status == kernels.STATUS_RANK_DEFICIENT:
        raise SolverError("constraint matrix rank-deficient: no vertex basis "
                          "(inequality-form active set needs full column rank)")
    if status == kernels.STATUS_STALLED:
        raise SolverError("pivot limit exceeded")


def solve_node(problem: MpProblem, zeros, ones, theta, warm_start=None,
               relax: Relaxation | None = None, trace=None) -> RelaxResult:
    """Solve the relaxation at a fixed theta.

    `warm_start` (QP only) is an active set of gids from a parent node.
    `trace`, when given, receives one text line per pivot-relevant event.
    """
    if relax is None:
        relax = build_relaxation(problem, zeros, ones)
    theta = np.asarray(theta, dtype=float)
    b = relax.rhs(theta)
    if problem.is_qp:
        check_strictly_convex(problem)
        flin = relax.lin0 + relax.linT @ theta
        warm = filter_warm_set(relax, warm_start or ())
        status, xf, J, wset, iters = kernels.qp_solve(
            relax.H, flin, relax.A, b, warm,
            QP_MAX_ITER_BASE + 20 * relax.n_rows)
    else:
        status, xf, J, wset, iters = kernels.lp_solve(relax.A, b, relax.lin0)
    _raise_for_status(status)
    offset = relax.off0 + float(relax.offT @ theta)
    gids = tuple(int(relax.row_gids[i]) for i in wset)
    if trace is not None:
        trace(f"node zeros={relax.zeros} ones={relax.ones} status={status} "
              f"iters={iters} active={gids}")
    if status == kernels.STATUS_INFEASIBLE:
        return RelaxResult(status="infeasible", x=None, J=np.inf,
                           active_set=gids, iterations=int(iters))
    x_full = relax.full_x(xf, gids)
    return RelaxResult(status="optimal", x=x_full, J=float(J) + offset,
                       active_set=gids, iterations=int(iters), x_free=xf)


def solve_relaxation(spec: RelaxationSpec) -> RelaxResult:
    node = spec.node
    return solve_node(spec.problem, node.zeros, node.ones, spec.theta,
                      warm_start=spec.warm_start)
