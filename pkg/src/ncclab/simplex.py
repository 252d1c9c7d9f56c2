"""Dense two-phase primal simplex with Bland's rule.

Solves ``max c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0`` on a full
numpy tableau.  Meant for the small LPs of this package (a few hundred rows);
Bland's smallest-index rule makes degenerate pivoting terminate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, Unbounded

PIVOT_EPS = 1e-11
COST_EPS = 1e-11


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    y_ub: np.ndarray
    y_eq: np.ndarray
    iterations: int

    def certificate_residual(self, c, A_ub, b_ub, A_eq, b_eq) -> float:
        """Largest violation among dual feasibility, complementary slackness
        and the primal/dual objective gap."""
        c = np.asarray(c, float)
        d = c.copy()
        gap_dual = 0.0
        parts = [0.0]
        if A_ub is not None and len(b_ub):
            slack = b_ub - A_ub @ self.x
            d -= A_ub.T @ self.y_ub
            gap_dual += b_ub @ self.y_ub
            parts += [np.max(np.abs(self.y_ub * slack)), np.max(np.maximum(-self.y_ub, 0.0))]
        if A_eq is not None and len(b_eq):
            d -= A_eq.T @ self.y_eq
            gap_dual += b_eq @ self.y_eq
        parts += [np.max(np.maximum(d, 0.0)), np.max(np.abs(self.x * d)),
                  abs(self.objective - gap_dual)]
        return float(max(parts))


class _Tableau:
    def __init__(self, T: np.ndarray, basis: np.ndarray, obj: np.ndarray):
        self.T = T
        self.basis = basis
        self.obj = obj
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        colvals = T[:, col].copy()
        colvals[row] = 0.0
        T -= np.outer(colvals, T[row])
        self.obj -= self.obj[col] * T[row]
        self.basis[row] = col
        self.iterations += 1

    def run(self, allowed: np.ndarray, max_iter: int) -> None:
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError(f"simplex exceeded {max_iter} pivots")
            cand = np.nonzero((self.obj[:-1] < -COST_EPS) & allowed)[0]
            if cand.size == 0:
                return
            col = int(cand[0])
            column = self.T[:, col]
            rows = np.nonzero(column > PIVOT_EPS)[0]
            if rows.size == 0:
                raise Unbounded(f"column {col} has no positive entry")
            ratios = self.T[rows, -1] / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            row = int(tied[np.argmin(self.basis[tied])])
            self.pivot(row, col)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, feas_tol: float = 1e-9,
             max_iter: int = 200_000) -> LPResult:
    c = np.asarray(c, float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float)
    m_ub, m_eq = len(b_ub), len(b_eq)

    # all-zero equality rows carry no information
    keep_eq = np.ones(m_eq, bool)
    for i in range(m_eq):
        if not np.any(A_eq[i]):
            if abs(b_eq[i]) > feas_tol:
                raise Infeasible(f"equality row {i} reads 0 = {b_eq[i]}")
            keep_eq[i] = False
    eq_rows = np.nonzero(keep_eq)[0]

    rows, rhs, sign, ident = [], [], [], []
    n_slack = m_ub
    n_art = 0
    art_of_row = []
    for i in range(m_ub):
        s = 1.0 if b_ub[i] >= 0 else -1.0
        rows.append(("ub", i))
        sign.append(s)
        if s > 0:
            art_of_row.append(None)
        else:
            art_of_row.append(n_art)
            n_art += 1
    for i in eq_rows:
        rows.append(("eq", int(i)))
        sign.append(1.0 if b_eq[i] >= 0 else -1.0)
        art_of_row.append(n_art)
        n_art += 1

    m = len(rows)
    N = n + n_slack + n_art
    T = np.zeros((m, N + 1))
    basis = np.zeros(m, dtype=int)
    for r, ((kind, i), s) in enumerate(zip(rows, sign)):
        if kind == "ub":
            T[r, :n] = s * A_ub[i]
            T[r, n + i] = s
            T[r, -1] = s * b_ub[i]
        else:
            T[r, :n] = s * A_eq[i]
            T[r, -1] = s * b_eq[i]
        if art_of_row[r] is None:
            basis[r] = n + i
        else:
            col = n + n_slack + art_of_row[r]
            T[r, col] = 1.0
            basis[r] = col
        ident.append(basis[r])

    is_art = np.zeros(N, bool)
    is_art[n + n_slack:] = True

    # phase 1: maximise -(sum of artificials)
    c1 = np.zeros(N)
    c1[is_art] = -1.0
    obj = np.append(c1[basis] @ T[:, :-1] - c1, c1[basis] @ T[:, -1])
    tab = _Tableau(T, basis, obj)
    if n_art:
        tab.run(np.ones(N, bool), max_iter)
        if -tab.obj[-1] > feas_tol * max(1.0, np.abs(T[:, -1]).max()):
            raise Infeasible(f"phase one optimum {-tab.obj[-1]:.3g} > 0")

        # drive zero-level artificials out of the basis; drop redundant rows
        drop = []
        for r in range(m):
            if is_art[tab.basis[r]]:
                cand = np.nonzero((np.abs(tab.T[r, :-1]) > 1e-9) & ~is_art)[0]
                if cand.size:
                    tab.pivot(r, int(cand[0]))
                else:
                    drop.append(r)
        if drop:
            keep = np.setdiff1d(np.arange(m), drop)
            tab.T = tab.T[keep]
            tab.basis = tab.basis[keep]
    else:
        drop = []

    # phase 2
    c2 = np.zeros(N)
    c2[:n] = c
    tab.obj = np.append(c2[tab.basis] @ tab.T[:, :-1] - c2, c2[tab.basis] @ tab.T[:, -1])
    tab.run(~is_art, max_iter)

    x_full = np.zeros(N)
    x_full[tab.basis] = tab.T[:, -1]
    x = np.maximum(x_full[:n], 0.0)

    y_ub = np.zeros(m_ub)
    y_eq = np.zeros(m_eq)
    dropped = set(drop)
    for r, (kind, i) in enumerate(rows):
        if r in dropped:
            continue
        y_std = tab.obj[ident[r]]
        if kind == "ub":
            y_ub[i] = sign[r] * y_std
        else:
            y_eq[i] = sign[r] * y_std
    return LPResult(x, float(c @ x), y_ub, y_eq, tab.iterations)
