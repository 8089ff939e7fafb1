"""Two-phase revised simplex for ``min c@x  s.t.  A@x = b, x >= 0``.

The basis inverse is kept explicitly and refreshed from scratch every
``refactor`` pivots. Pricing uses the most negative reduced cost and falls
back to Bland's smallest-index rule after ``stall`` consecutive pivots with no
strict objective decrease, until the objective moves again; Bland's rule
cannot cycle, so the method terminates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT = "optimal", "infeasible", "unbounded", "iteration_limit"


@dataclass
class LPResult:
    status: str
    x: np.ndarray
    objective: float
    duals: np.ndarray  # one multiplier per equality row
    iterations: int


class _Revised:
    def __init__(self, A, b, tol, refactor, stall, max_iter):
        m, n = A.shape
        self.A = A
        self.AT = A.T.tocsr()
        self.b = b
        self.m, self.n = m, n
        self.tol = tol
        self.refactor = refactor
        self.stall = stall
        self.max_iter = max_iter
        # artificial k has column index n + k
        self.basis = np.arange(n, n + m)
        self.Binv = np.eye(m)
        self.xB = b.copy()
        self.iterations = 0

    def column(self, j: int) -> np.ndarray:
        if j >= self.n:
            e = np.zeros(self.m)
            e[j - self.n] = 1.0
            return e
        return self.A[:, j].toarray().ravel()

    def refresh(self) -> None:
        B = np.column_stack([self.column(j) for j in self.basis])
        self.Binv = np.linalg.inv(B)
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < self.tol] = 0.0

    def pivot(self, row: int, col: int, u: np.ndarray) -> None:
        step = self.xB[row] / u[row]
        self.xB -= step * u
        self.xB[row] = step
        self.xB[np.abs(self.xB) < self.tol] = 0.0
        piv = self.Binv[row] / u[row]
        self.Binv -= np.outer(u, piv)
        self.Binv[row] = piv
        self.basis[row] = col
        self.iterations += 1
        if self.iterations % self.refactor == 0:
            self.refresh()

    def run(self, c_full: np.ndarray, allow_artificial: bool) -> str:
        """Minimize ``c_full`` (length n + m) from the current basis."""
        n = self.n
        bland = False
        since_gain = 0
        best = np.inf
        while True:
            if self.iterations >= self.max_iter:
                return ITERATION_LIMIT
            y = c_full[self.basis] @ self.Binv
            d = c_full[:n] - self.AT @ y
            d[self.basis[self.basis < n]] = 0.0
            if allow_artificial:
                d_art = c_full[n:] - y
                d_art[self.basis[self.basis >= n] - n] = 0.0
                d = np.concatenate([d, d_art])
            neg = np.flatnonzero(d < -self.tol)
            if neg.size == 0:
                return OPTIMAL
            col = int(neg[0]) if bland else int(neg[np.argmin(d[neg])])
            u = self.Binv @ self.column(col)
            row = self.ratio_test(u, bland, pin_artificials=not allow_artificial)
            if row < 0:
                return UNBOUNDED
            self.pivot(row, col, u)
            obj = float(c_full[self.basis] @ self.xB)
            if obj < best - self.tol:
                best = obj
                since_gain = 0
                bland = False
            else:
                since_gain += 1
                if since_gain >= self.stall:
                    bland = True

    def ratio_test(self, u: np.ndarray, bland: bool, pin_artificials: bool) -> int:
        tol = self.tol
        # in phase 2 an artificial left in the basis sits at zero and must stay there
        art = (self.basis >= self.n) & (np.abs(u) > tol)
        if pin_artificials and np.any(art):
            rows = np.flatnonzero(art)
            return int(rows[np.argmin(self.basis[rows])])
        pos = np.flatnonzero(u > tol)
        if pos.size == 0:
            return -1
        ratios = self.xB[pos] / u[pos]
        rmin = ratios.min()
        tied = pos[ratios <= rmin + tol]
        if bland or tied.size > 1:
            return int(tied[np.argmin(self.basis[tied])])
        return int(tied[0])


def solve(c, A, b, *, tol: float = 1e-9, refactor: int = 64, stall: int = 50,
          max_iter: int = 200_000) -> LPResult:
    """Minimize ``c @ x`` subject to ``A @ x == b`` and ``x >= 0``."""
    A = sparse.csc_matrix(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("dimension mismatch between c, A and b")
    flip = b < 0
    if np.any(flip):
        D = sparse.diags(np.where(flip, -1.0, 1.0))
        A = (D @ A).tocsc()
        b[flip] *= -1

    lp = _Revised(A, b, tol, refactor, stall, max_iter)
    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    status = lp.run(phase1, allow_artificial=True)
    if status == ITERATION_LIMIT:
        return _result(lp, c, status, flip)
    if float(lp.xB[lp.basis >= n].sum()) > max(tol, 1e-7 * max(1.0, b.sum())):
        return _result(lp, c, INFEASIBLE, flip)
    _drive_out_artificials(lp)

    phase2 = np.concatenate([c, np.zeros(m)])
    status = lp.run(phase2, allow_artificial=False)
    lp.refresh()
    return _result(lp, c, status, flip)


def _drive_out_artificials(lp: _Revised) -> None:
    n = lp.n
    for row in range(lp.m):
        if lp.basis[row] < n:
            continue
        # candidate entering columns have a nonzero entry in this row of Binv @ A
        r_row = lp.AT @ lp.Binv[row]
        r_row[lp.basis[lp.basis < n]] = 0.0
        cand = np.flatnonzero(np.abs(r_row) > 1e-7)
        if cand.size == 0:
            continue  # redundant row; its artificial stays at zero
        col = int(cand[0])
        lp.pivot(row, col, lp.Binv @ lp.column(col))


def _result(lp: _Revised, c: np.ndarray, status: str, flip: np.ndarray) -> LPResult:
    x = np.zeros(lp.n)
    real = lp.basis < lp.n
    x[lp.basis[real]] = lp.xB[real]
    x[x < 0] = 0.0
    c_full = np.concatenate([c, np.zeros(lp.m)])
    duals = c_full[lp.basis] @ lp.Binv
    duals[flip] *= -1
    return LPResult(status, x, float(c @ x), duals, lp.iterations)
