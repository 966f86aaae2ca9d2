"""Compiled numerical kernels: LP and QP relaxation solvers for fixed
parameters.

Pivot rules are deterministic and are mirrored one-to-one by the parametric
engine in `mpcert`:

LP (inequality form, min c'x s.t. Ax <= b), dual active-set:
  * phase 1 finds a dual-feasible basis (a vertex of {lam >= 0: A'lam = -c})
    with a primal simplex over artificials; this step does not depend on b.
  * phase 2 prices the most violated primal row (ties: lowest row index;
    Bland's rule = lowest violated row after 50 consecutive degenerate
    pivots) and leaves via the dual ratio test (ties: lowest row index).
  * no positive ratio-test denominator means the relaxation is infeasible.

QP (min 0.5 x'Hx + f'x s.t. Ax <= b, H positive definite), dual active-set:
  * start from the unconstrained minimizer (or a warm-started working set),
  * add the most violated constraint (ties: lowest row index),
  * if the new row is dependent on the working set, drop the blocker with
    the smallest multiplier/coefficient ratio, or report infeasibility when
    no coefficient is positive,
  * once feasible, drop the most negative multiplier (ties: lowest row
    index) until all multipliers are nonnegative.

Iteration counts are the number of working-set changes.  The parameter-free
decision helpers (`lp_dual_step`, `qp_dependence`) are shared with the
parametric engine so both sides resolve those pivots with identical
arithmetic.
"""

import numpy as np
from numba import njit

# online decision tolerances; deliberately tight so that the bands where the
# online solver and the exact parametric comparisons can disagree are narrow
TOL_VIOLATION = 1e-10
TOL_MULTIPLIER = 1e-10
TOL_PIVOT = 1e-9
TOL_DEGENERATE = 1e-12
TOL_DEPENDENT = 1e-9
BLAND_AFTER = 50
PHASE1_OBJ_TOL = 1e-7

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_UNBOUNDED = 2
STATUS_RANK_DEFICIENT = 3
STATUS_STALLED = 4


@njit(cache=True)
def lp_phase1(A, c):
    """Dual-feasible basis for min c'x s.t. Ax <= b (independent of b).

    Returns (status, basis, pivots): basis is a sorted array of n row
    indices with A[basis] invertible and -A[basis]^-T c >= 0.
    """
    m, n = A.shape
    ncols = m + n
    G = np.zeros((n, ncols))
    G[:, :m] = A.T
    rhs = -c
    cost = np.zeros(ncols)
    for j in range(m, ncols):
        cost[j] = 1.0
    basis = np.empty(n, dtype=np.int64)
    for i in range(n):
        basis[i] = m + i
        G[i, m + i] = 1.0 if rhs[i] >= 0.0 else -1.0
    in_basis = np.zeros(ncols, dtype=np.uint8)
    for i in range(n):
        in_basis[basis[i]] = 1

    pivots = 0
    degen = 0
    max_iter = 200 + 40 * ncols
    finished = False
    for _ in range(max_iter):
        B = np.empty((n, n))
        for i in range(n):
            B[:, i] = G[:, basis[i]]
        xB = np.linalg.solve(B, rhs)
        cb = np.empty(n)
        for i in range(n):
            cb[i] = cost[basis[i]]
        y = np.linalg.solve(B.T, cb)
        enter = -1
        if degen < BLAND_AFTER:
            best = -1e-9
            for j in range(ncols):
                if in_basis[j]:
                    continue
                rj = cost[j] - y @ G[:, j]
                if rj < best:
                    best = rj
                    enter = j
        else:
            for j in range(ncols):
                if in_basis[j]:
                    continue
                rj = cost[j] - y @ G[:, j]
                if rj < -1e-9:
                    enter = j
                    break
        if enter < 0:
            obj = 0.0
            for i in range(n):
                if basis[i] >= m:
                    obj += xB[i]
            if obj > PHASE1_OBJ_TOL:
                return STATUS_UNBOUNDED, basis[:0], pivots
            finished = True
            break
        d = np.linalg.solve(B, G[:, enter])
        leave = -1
        best_t = 1e300
        for i in range(n):
            if d[i] > TOL_PIVOT:
                t = xB[i] / d[i]
                if leave < 0 or t < best_t:
                    best_t = t
                    leave = i
        if leave < 0:
            return STATUS_RANK_DEFICIENT, basis[:0], pivots
        if best_t <= TOL_DEGENERATE:
            degen += 1
        else:
            degen = 0
        in_basis[basis[leave]] = 0
        basis[leave] = enter
        in_basis[enter] = 1
        pivots += 1
    if not finished:
        return STATUS_STALLED, basis[:0], pivots

    # drive remaining artificials out of the basis
    for p in range(n):
        if basis[p] < m:
            continue
        B = np.empty((n, n))
        for i in range(n):
            B[:, i] = G[:, basis[i]]
        replaced = False
        for j in range(m):
            if in_basis[j]:
                continue
            d = np.linalg.solve(B, G[:, j])
            if abs(d[p]) > 1e-8:
                in_basis[basis[p]] = 0
                basis[p] = j
                in_basis[j] = 1
                replaced = True
                break
        if not replaced:
            return STATUS_RANK_DEFICIENT, basis[:0], pivots

    return STATUS_OPTIMAL, np.sort(basis), pivots


@njit(cache=True)
def lp_dual_step(A, c, basis, r):
    """Dual ratio test for entering row r at the given (sorted) basis.

    Independent of the right-hand side, hence shared verbatim between the
    online and parametric engines.  Returns (leave_pos, degenerate); a
    negative position certifies primal infeasibility.
    """
    n = A.shape[1]
    B = np.empty((n, n))
    for i in range(n):
        B[i, :] = A[basis[i]]
    lam = np.linalg.solve(B.T, -c)
    beta = np.linalg.solve(B.T, A[r])
    leave = -1
    best_t = 1e300
    for i in range(n):
        if beta[i] > TOL_PIVOT:
            t = lam[i] / beta[i]
            if leave < 0 or t < best_t:
                best_t = t
                leave = i
    degenerate = leave >= 0 and lam[leave] <= TOL_DEGENERATE
    return leave, degenerate


@njit(cache=True)
def lp_phase2(A, b, c, basis0, degen0):
    """Dual simplex from a dual-feasible basis.

    Returns (status, x, J, basis, pivots, degen); pivots counts basis
    changes in this phase only.
    """
    m, n = A.shape
    basis = basis0.copy()
    pivots = 0
    degen = degen0
    in_basis = np.zeros(m, dtype=np.uint8)
    for i in range(n):
        in_basis[basis[i]] = 1
    max_iter = 200 + 40 * m
    x = np.zeros(n)
    for _ in range(max_iter):
        B = np.empty((n, n))
        for i in range(n):
            B[i, :] = A[basis[i]]
        bb = np.empty(n)
        for i in range(n):
            bb[i] = b[basis[i]]
        x = np.linalg.solve(B, bb)
        r = -1
        if degen < BLAND_AFTER:
            best = TOL_VIOLATION
            for i in range(m):
                if in_basis[i]:
                    continue
                v = A[i] @ x - b[i]
                if v > best:
                    best = v
                    r = i
        else:
            for i in range(m):
                if in_basis[i]:
                    continue
                v = A[i] @ x - b[i]
                if v > TOL_VIOLATION:
                    r = i
                    break
        if r < 0:
            J = c @ x
            return STATUS_OPTIMAL, x, J, basis, pivots, degen
        leave, degenerate = lp_dual_step(A, c, basis, r)
        if leave < 0:
            return STATUS_INFEASIBLE, x, np.inf, basis, pivots, degen
        if degenerate:
            degen += 1
        else:
            degen = 0
        in_basis[basis[leave]] = 0
        basis[leave] = r
        in_basis[r] = 1
        basis = np.sort(basis)
        pivots += 1
    return STATUS_STALLED, x, np.inf, basis, pivots, degen


@njit(cache=True)
def lp_solve(A, b, c):
    """Full LP solve; returns (status, x, J, basis, iterations)."""
    m, n = A.shape
    if n == 0:
        ok = True
        for i in range(m):
            if b[i] < -TOL_VIOLATION:
                ok = False
                break
        empty = np.empty(0, dtype=np.int64)
        if ok:
            return STATUS_OPTIMAL, np.zeros(0), 0.0, empty, 0
        return STATUS_INFEASIBLE, np.zeros(0), np.inf, empty, 0
    st1, basis, p1 = lp_phase1(A, c)
    if st1 != STATUS_OPTIMAL:
        return st1, np.zeros(n), np.inf, basis, p1
    st2, x, J, basis, p2, _ = lp_phase2(A, b, c, basis, 0)
    return st2, x, J, basis, p1 + p2


@njit(cache=True)
def kkt_solve_numeric(H, f, A, b, W):
    """Solve the KKT system with working set W; returns (x, lam)."""
    n = H.shape[0]
    nw = W.shape[0]
    K = np.zeros((n + nw, n + nw))
    K[:n, :n] = H
    rhs = np.empty(n + nw)
    rhs[:n] = -f
    for i in range(nw):
        K[:n, n + i] = A[W[i]]
        K[n + i, :n] = A[W[i]]
        rhs[n + i] = b[W[i]]
    sol = np.linalg.solve(K, rhs)
    return sol[:n], sol[n:]


@njit(cache=True)
def qp_dependence(A, W, r):
    """Check whether row r depends on the working-set rows.

    Parameter-free, shared with the parametric engine.  Returns
    (dependent, alpha) with A[r] ~= alpha @ A[W] when dependent.
    """
    n = A.shape[1]
    nw = W.shape[0]
    Aw = np.empty((nw, n))
    for i in range(nw):
        Aw[i] = A[W[i]]
    alpha, res, rank, sv = np.linalg.lstsq(Aw.T, A[r])
    resid = A[r] - Aw.T @ alpha
    nrm = np.sqrt(A[r] @ A[r])
    dependent = np.sqrt(resid @ resid) <= TOL_DEPENDENT * max(1.0, nrm)
    return dependent, alpha


@njit(cache=True)
def qp_solve(H, f, A, b, warm, max_iter):
    """Dual active-set QP solve; returns (status, x, J, working_set, iters).

    `warm` holds an initial working set of independent rows (possibly
    empty), sorted ascending.
    """
    m, n = A.shape
    if n == 0:
        ok = True
        for i in range(m):
            if b[i] < -TOL_VIOLATION:
                ok = False
                break
        empty = np.empty(0, dtype=np.int64)
        if ok:
            return STATUS_OPTIMAL, np.zeros(0), 0.0, empty, 0
        return STATUS_INFEASIBLE, np.zeros(0), np.inf, empty, 0
    W = np.empty(m, dtype=np.int64)
    nw = 0
    for i in range(warm.shape[0]):
        W[nw] = warm[i]
        nw += 1
    iters = 0
    in_w = np.zeros(m, dtype=np.uint8)
    for i in range(nw):
        in_w[W[i]] = 1
    for _ in range(max_iter):
        x, lam = kkt_solve_numeric(H, f, A, b, W[:nw])
        r = -1
        best = TOL_VIOLATION
        for i in range(m):
            if in_w[i]:
                continue
            v = A[i] @ x - b[i]
            if v > best:
                best = v
                r = i
        if r < 0:
            jdrop = -1
            worst = -TOL_MULTIPLIER
            for i in range(nw):
                if lam[i] < worst:
                    worst = lam[i]
                    jdrop = i
            if jdrop < 0:
                J = 0.5 * x @ (H @ x) + f @ x
                return STATUS_OPTIMAL, x, J, W[:nw].copy(), iters
            in_w[W[jdrop]] = 0
            for i in range(jdrop, nw - 1):
                W[i] = W[i + 1]
            nw -= 1
            iters += 1
            continue
        if nw == 0:
            W[0] = r
            nw = 1
            in_w[r] = 1
            iters += 1
            continue
        dependent, alpha = qp_dependence(A, W[:nw], r)
        if not dependent:
            pos = nw
            for i in range(nw):
                if W[i] > r:
                    pos = i
                    break
            for i in range(nw, pos, -1):
                W[i] = W[i - 1]
            W[pos] = r
            nw += 1
            in_w[r] = 1
            iters += 1
            continue
        jdrop = -1
        best_t = 1e300
        for i in range(nw):
            if alpha[i] > TOL_DEPENDENT:
                t = lam[i] / alpha[i]
                if t < best_t:
                    best_t = t
                    jdrop = i
        if jdrop < 0:
            return STATUS_INFEASIBLE, x, np.inf, W[:nw].copy(), iters
        in_w[W[jdrop]] = 0
        for i in range(jdrop, nw - 1):
            W[i] = W[i + 1]
        nw -= 1
        iters += 1
    return STATUS_STALLED, np.zeros(n), np.inf, W[:nw].copy(), iters
