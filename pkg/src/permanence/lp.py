"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Only meant for the tiny programs built by :mod:`permanence.certificates`
(a handful of variables and at most ``2**n`` rows), where determinism matters
more than speed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "LPError", "linprog_max"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPError(RuntimeError):
    """Numerical failure inside the simplex iterations."""


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None
    value: float | None
    iterations: int


def _pivot(T, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run(T, basis, n_cols, eps, max_iter, it0=0):
    """Maximise the objective held in the last row (stored as ``z - c.x``)."""
    it = it0
    while True:
        obj = T[-1, :n_cols]
        candidates = np.flatnonzero(obj < -eps)
        if candidates.size == 0:
            return OPTIMAL, it
        col = int(candidates[0])  # Bland: lowest index enters
        column = T[:-1, col]
        rows = np.flatnonzero(column > eps)
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + eps * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))  # Bland: lowest index leaves
        _pivot(T, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise LPError(f"simplex exceeded {max_iter} iterations")
        if not np.all(np.isfinite(T)):
            raise LPError("non-finite tableau entry")


def linprog_max(c, A_ub, b_ub, eps=1e-11, max_iter=None):
    """Maximise ``c @ x`` subject to ``A_ub @ x <= b_ub`` and ``x >= 0``.

    Parameters
    ----------
    c : array_like, shape (n,)
    A_ub : array_like, shape (m, n)
    b_ub : array_like, shape (m,)
        May contain negative entries; a first phase then finds a feasible
        basis.
    eps : float
        Pivot and optimality tolerance, relative to the largest input entry.

    Returns
    -------
    LPResult
        ``status`` is ``"optimal"``, ``"infeasible"`` or ``"unbounded"``.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    A = np.atleast_2d(np.asarray(A_ub, dtype=float))
    b = np.asarray(b_ub, dtype=float).reshape(-1)
    m, n = A.shape
    if c.shape[0] != n or b.shape[0] != m:
        raise ValueError("inconsistent LP dimensions")
    scale = max(1.0, np.abs(A).max(initial=0.0), np.abs(b).max(initial=0.0), np.abs(c).max(initial=0.0))
    tol = eps * scale
    if max_iter is None:
        max_iter = 50 * (m + n + 10)

    neg = b < 0
    n_art = int(neg.sum())
    n_cols = n + m + n_art
    T = np.zeros((m + 1, n_cols + 1))
    basis = np.empty(m, dtype=int)
    art = n + m
    for i in range(m):
        sign = -1.0 if neg[i] else 1.0
        T[i, :n] = sign * A[i]
        T[i, n + i] = sign
        T[i, -1] = sign * b[i]
        if neg[i]:
            T[i, art] = 1.0
            basis[i] = art
            art += 1
        else:
            basis[i] = n + i

    it = 0
    if n_art:
        T[-1, n + m:n_cols] = 1.0
        for i in range(m):
            if basis[i] >= n + m:
                T[-1] -= T[i]
        status, it = _run(T, basis, n_cols, tol, max_iter)
        if status != OPTIMAL:
            raise LPError("phase one did not terminate at an optimum")
        if T[-1, -1] < -tol * max(1, m):
            return LPResult(INFEASIBLE, None, None, it)
        # Drive remaining zero-level artificials out of the basis.
        keep = np.ones(m + 1, dtype=bool)
        for i in range(m):
            if basis[i] >= n + m:
                cols = np.flatnonzero(np.abs(T[i, : n + m]) > tol)
                if cols.size:
                    _pivot(T, i, int(cols[0]))
                    basis[i] = int(cols[0])
                else:
                    keep[i] = False
        T = np.delete(T[keep], np.s_[n + m:n_cols], axis=1)
        basis = basis[keep[:-1]]
        n_cols = n + m

    T[-1, :] = 0.0
    T[-1, :n] = -c
    for i, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[i]
    status, it = _run(T, basis, n_cols, tol, max_iter, it)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None, it)
    x = np.zeros(n_cols)
    x[basis] = T[:-1, -1]
    x = x[:n]
    return LPResult(OPTIMAL, x, float(c @ x), it)
