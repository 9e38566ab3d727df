"""Dense-tableau two-phase simplex method with Bland's anti-cycling rule.

Solves ``max c.z`` subject to ``A_ub z <= b_ub``, ``A_ge z >= b_ge`` and
``z >= 0`` with non-negative right-hand sides.  Intended for desk-scale
problems; every pivot touches the whole tableau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded" | "iteration_limit"
    z: np.ndarray | None
    objective: float
    iterations: int
    # per >= row: artificial value left after phase 1 (all ~0 when feasible)
    ge_residuals: np.ndarray
    ub_slack: np.ndarray | None = None
    ge_surplus: np.ndarray | None = None


def _pivot(T, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _iterate(T, basis, cost, allowed, tol, max_iter):
    """Run primal simplex pivots maximizing ``cost`` over columns in ``allowed``."""
    its = 0
    while its < max_iter:
        reduced = cost[basis] @ T[:, :-1] - cost
        entering = -1
        for j in np.nonzero(allowed)[0]:
            if reduced[j] < -tol:
                entering = int(j)
                break
        if entering < 0:
            return "optimal", its
        col = T[:, entering]
        best_row, best_ratio = -1, np.inf
        for r in range(T.shape[0]):
            if col[r] > tol:
                ratio = T[r, -1] / col[r]
                if ratio < best_ratio - tol or (
                        abs(ratio - best_ratio) <= tol and basis[r] < basis[best_row]):
                    best_row, best_ratio = r, ratio
        if best_row < 0:
            return "unbounded", its
        _pivot(T, best_row, entering)
        basis[best_row] = entering
        its += 1
    return "iteration_limit", its


def simplex_max(c, A_ub=None, b_ub=None, A_ge=None, b_ge=None, tol=1e-9, max_iter=10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    nv = c.shape[0]
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_ge = np.zeros((0, nv)) if A_ge is None else np.asarray(A_ge, dtype=float).reshape(-1, nv)
    b_ge = np.zeros(0) if b_ge is None else np.asarray(b_ge, dtype=float)
    if np.any(b_ub < 0) or np.any(b_ge < 0):
        raise ValueError("right-hand sides must be non-negative")

    p, q = A_ub.shape[0], A_ge.shape[0]
    # a >= row with zero rhs becomes -a.z <= 0 and gets an ordinary slack
    zero_ge = b_ge <= 0.0
    art_rows = np.nonzero(~zero_ge)[0]
    n_art = art_rows.size
    rows = p + q
    ncols = nv + p + q + n_art
    T = np.zeros((rows, ncols + 1))
    basis = np.empty(rows, dtype=np.int64)

    T[:p, :nv] = A_ub
    T[:p, nv:nv + p] = np.eye(p)
    T[:p, -1] = b_ub
    basis[:p] = np.arange(nv, nv + p)

    art_col = {}
    for k in range(q):
        r = p + k
        s = nv + p + k
        if zero_ge[k]:
            T[r, :nv] = -A_ge[k]
            T[r, s] = 1.0
            basis[r] = s
        else:
            a = nv + p + q + len(art_col)
            art_col[k] = a
            T[r, :nv] = A_ge[k]
            T[r, s] = -1.0
            T[r, a] = 1.0
            T[r, -1] = b_ge[k]
            basis[r] = a

    total_its = 0
    residuals = np.zeros(q)
    allowed = np.ones(ncols, dtype=bool)
    if n_art:
        cost1 = np.zeros(ncols)
        cost1[nv + p + q:] = -1.0
        status, its = _iterate(T, basis, cost1, allowed, tol, max_iter)
        total_its += its
        if status != "optimal":
            return LPResult(status, None, np.nan, total_its, residuals)
        values = np.zeros(ncols)
        values[basis] = T[:, -1]
        for k, a in art_col.items():
            residuals[k] = values[a]
        if residuals.sum() > tol * max(1.0, float(b_ge.sum())):
            return LPResult("infeasible", None, np.nan, total_its, residuals)
        # drive zero-level artificials out of the basis
        for r in range(rows):
            if basis[r] >= nv + p + q:
                nz = [j for j in range(nv + p + q) if abs(T[r, j]) > tol]
                if nz:
                    _pivot(T, r, nz[0])
                    basis[r] = nz[0]
        allowed[nv + p + q:] = False
        keep = basis < nv + p + q  # redundant rows keep a zero artificial; harmless
        if not keep.all():
            T = T[keep]
            basis = basis[keep]

    cost2 = np.zeros(ncols)
    cost2[:nv] = c
    status, its = _iterate(T, basis, cost2, allowed, tol, max_iter - total_its)
    total_its += its
    if status != "optimal":
        return LPResult(status, None, np.nan, total_its, residuals)
    values = np.zeros(ncols)
    values[basis] = T[:, -1]
    z = values[:nv]
    slack = values[nv:nv + p]
    surplus = values[nv + p:nv + p + q].copy()
    # zero-rhs >= rows carry a slack of -a.z <= 0, i.e. the surplus itself
    return LPResult("optimal", z, float(c @ z), total_its, residuals, slack, surplus)
