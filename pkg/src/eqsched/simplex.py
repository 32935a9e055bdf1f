"""Bundled reference LP engine: two-phase primal simplex with variable bounds.

Solves   min c'x  s.t.  E x = e,  G x >= g,  lo <= x <= hi
by adding one surplus column per inequality and one artificial column per row,
then pivoting on a dense tableau.  Nonbasic variables rest on a bound, so
branch fixings (lo = hi) need no extra rows.  Dantzig pricing by default;
after a run of degenerate pivots the engine switches to Bland's rule until it
makes progress again, which rules out cycling.

The ``exact`` mode runs the same algorithm on ``fractions.Fraction`` entries
with zero tolerances; it is meant for oracle-grade verification of small
problems, not for speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
FEAS_TOL = 1e-7

#: Consecutive non-improving pivots tolerated before Bland's rule kicks in,
#: as a multiple of the row count.
STALL_FACTOR = 5

SparseRow = tuple[Sequence[int], Sequence[float]]


class SimplexFailure(Exception):
    """Numerical breakdown or an unbounded direction (unexpected here)."""


class IterationLimit(SimplexFailure):
    """Pivot budget exhausted; never returned as a silent suboptimal answer."""


@dataclass
class Basis:
    """Restartable snapshot: basic column ids and per-column statuses."""

    basic: tuple[int, ...]
    statuses: tuple[int, ...]


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible"
    x: Optional[np.ndarray]
    objective: Optional[float]
    iterations: int
    basis: Optional[Basis] = None


def _dense_rows(rows, ncols, dtype):
    out = np.zeros((len(rows), ncols), dtype=dtype)
    for i, (cols, coefs) in enumerate(rows):
        for c, a in zip(cols, coefs):
            out[i, c] += a
    return out


class _Tableau:
    def __init__(self, A, b, lo, hi, n_real, exact):
        self.exact = exact
        self.zero = Fraction(0) if exact else 0.0
        self.ptol = 0 if exact else PIVOT_TOL
        self.ctol = 0 if exact else COST_TOL
        self.m, self.ncols = A.shape
        self.n_real = n_real  # structural + surplus columns; the rest are artificial
        self.A = A
        self.b = b
        self.lo = lo
        self.hi = hi  # entries may be None (unbounded above)
        self.status = np.full(self.ncols, AT_LOWER, dtype=int)
        self.basic = [-1] * self.m
        self.T = None
        self.beta = None
        self.d = None  # reduced costs of the active phase
        self.iterations = 0
        self.stall = 0
        self.excluded = [False] * self.ncols

    # -- setup ---------------------------------------------------------------

    def install_artificial_basis(self):
        z = self.nonbasic_values()
        resid = self.b - self.A[:, : self.n_real] @ z
        T = self.A.copy()
        beta = resid.copy()
        for i in range(self.m):
            sign = 1 if resid[i] >= 0 else -1
            art = self.n_real + i
            T[i, art] = sign * self._one()
            if sign < 0:
                T[i, :] = -T[i, :]
                beta[i] = -beta[i]
            self.basic[i] = art
            self.status[art] = BASIC
        self.T = T
        self.beta = beta

    def _one(self):
        return Fraction(1) if self.exact else 1.0

    def nonbasic_values(self):
        z = np.zeros(self.n_real, dtype=object if self.exact else float)
        for j in range(self.n_real):
            if self.status[j] == AT_UPPER:
                z[j] = self.hi[j]
            else:
                z[j] = self.lo[j]
        return z

    def set_costs(self, c):
        d = c.astype(object).copy() if self.exact else c.astype(float).copy()
        for i in range(self.m):
            cb = d[self.basic[i]]
            if cb != 0:
                d = d - cb * self.T[i]
        self.d = d

    # -- pivoting ------------------------------------------------------------

    def _entering(self, allow, bland):
        best, best_score = -1, self.ctol
        for j in range(self.ncols):
            if self.status[j] == BASIC or self.excluded[j] or not allow[j]:
                continue
            if self.lo[j] is not None and self.hi[j] is not None and self.lo[j] == self.hi[j]:
                continue
            dj = self.d[j]
            score = -dj if self.status[j] == AT_LOWER else dj
            if score > best_score:
                if bland:
                    return j
                best, best_score = j, score
        return best

    def _ratio_test(self, e, dsign, bland):
        """Smallest step before a basic variable or the entering bound blocks."""
        inf = float("inf")
        limit = inf
        row = -1
        to_upper = False
        hi_e, lo_e = self.hi[e], self.lo[e]
        flip = inf if hi_e is None else hi_e - lo_e
        col = self.T[:, e]
        for i in range(self.m):
            rate = -col[i] * dsign
            if rate > self.ptol:
                hib = self.hi[self.basic[i]]
                if hib is None:
                    continue
                room = hib - self.beta[i]
                cand = room / rate
                hits_upper = True
            elif rate < -self.ptol:
                room = self.beta[i] - self.lo[self.basic[i]]
                cand = room / (-rate)
                hits_upper = False
            else:
                continue
            if cand < 0:
                cand = 0 * cand
            better = cand < limit
            tie = not better and cand == limit and row >= 0
            if tie:
                if bland:
                    better = self.basic[i] < self.basic[row]
                else:
                    better = abs(col[i]) > abs(col[row])
            if better:
                limit, row, to_upper = cand, i, hits_upper
        if flip < limit:
            return flip, -1, False
        return limit, row, to_upper

    def _pivot(self, r, e, entering_value):
        T, d = self.T, self.d
        pv = T[r, e]
        if abs(pv) <= self.ptol:
            raise SimplexFailure("pivot element vanished")
        T[r, :] = T[r, :] / pv
        colvals = T[:, e].copy()
        colvals[r] = self.zero
        self.T = T - np.outer(colvals, T[r, :])
        self.T[r, :] = T[r, :]
        self.d = d - d[e] * self.T[r, :]
        leaving = self.basic[r]
        self.basic[r] = e
        self.status[e] = BASIC
        self.beta[r] = entering_value
        return leaving

    def run(self, allow, max_iterations):
        stall_threshold = STALL_FACTOR * max(self.m, 1)
        while True:
            self.iterations += 1
            if self.iterations > max_iterations:
                raise IterationLimit(f"no optimum within {max_iterations} pivots")
            bland = self.stall >= stall_threshold
            e = self._entering(allow, bland)
            if e < 0:
                return
            dsign = 1 if self.status[e] == AT_LOWER else -1
            step, row, to_upper = self._ratio_test(e, dsign, bland)
            if step == float("inf"):
                raise SimplexFailure("unbounded direction encountered")
            gain = abs(self.d[e]) * step
            self.stall = 0 if gain > self.ctol else self.stall + 1
            if step != 0:
                self.beta = self.beta - self.T[:, e] * (dsign * step)
            if row < 0:
                self.status[e] = AT_UPPER if self.status[e] == AT_LOWER else AT_LOWER
                continue
            start = self.lo[e] if dsign == 1 else self.hi[e]
            leaving = self._pivot(row, e, start + dsign * step)
            self.status[leaving] = AT_UPPER if to_upper else AT_LOWER

    # -- phase handling --------------------------------------------------------

    def phase1_infeasible(self):
        total = self.zero
        for i in range(self.m):
            if self.basic[i] >= self.n_real:
                total += self.beta[i]
        return total > (0 if self.exact else FEAS_TOL)

    def evict_artificials(self):
        for i in range(self.m):
            if self.basic[i] < self.n_real:
                continue
            target = -1
            for j in range(self.n_real):
                if self.status[j] != BASIC and not self.excluded[j] and abs(self.T[i, j]) > max(self.ptol, 1e-7 if not self.exact else 0):
                    target = j
                    break
            if target >= 0:
                value = self.lo[target] if self.status[target] == AT_LOWER else self.hi[target]
                leaving = self._pivot(i, target, value)
                self.status[leaving] = AT_LOWER
                self.excluded[leaving] = True
        for j in range(self.n_real, self.ncols):
            if self.status[j] != BASIC:
                self.excluded[j] = True

    def solution(self):
        z = np.zeros(self.n_real, dtype=object if self.exact else float)
        for j in range(self.n_real):
            if self.status[j] == AT_UPPER:
                z[j] = self.hi[j]
            else:
                z[j] = self.lo[j]
        for i in range(self.m):
            if self.basic[i] < self.n_real:
                z[self.basic[i]] = self.beta[i]
        return z


def solve_bounded(
    c: Sequence[float],
    eq_rows: Sequence[SparseRow],
    eq_rhs: Sequence[float],
    ge_rows: Sequence[SparseRow],
    ge_rhs: Sequence[float],
    bounds: Sequence[tuple[float, Optional[float]]],
    exact: bool = False,
    max_iterations: Optional[int] = None,
    basis: Optional[Basis] = None,
) -> SimplexResult:
    """Solve the bounded LP, returning an optimal basic solution or "infeasible"."""
    nstruct = len(c)
    m = len(eq_rows) + len(ge_rows)
    nsurplus = len(ge_rows)
    dtype = object if exact else float

    def lift(value):
        if value is None:
            return None
        return Fraction(value) if exact else float(value)

    A = np.zeros((m, nstruct + nsurplus + m), dtype=dtype)
    A[: len(eq_rows), :nstruct] = _dense_rows(eq_rows, nstruct, dtype)
    A[len(eq_rows):, :nstruct] = _dense_rows(ge_rows, nstruct, dtype)
    for i in range(nsurplus):
        A[len(eq_rows) + i, nstruct + i] = lift(-1)
    if exact:
        for idx in np.ndindex(A.shape):
            A[idx] = Fraction(A[idx])

    b = np.array([lift(v) for v in list(eq_rhs) + list(ge_rhs)], dtype=dtype)
    lo = [lift(bl) for bl, _ in bounds] + [lift(0)] * (nsurplus + m)
    hi = [lift(bh) for _, bh in bounds] + [None] * (nsurplus + m)
    for j, bl in enumerate(lo[:nstruct]):
        if bl is None:
            raise ValueError(f"variable {j} needs a finite lower bound")

    tab = _Tableau(A, b, lo, hi, nstruct + nsurplus, exact)
    budget = max_iterations or max(5000, 60 * max(m, 1))

    warm = False
    if basis is not None and not exact:
        warm = _try_warm_start(tab, basis)
    if not warm:
        tab.install_artificial_basis()
        phase1 = np.zeros(tab.ncols, dtype=dtype)
        for j in range(tab.n_real, tab.ncols):
            phase1[j] = lift(1)
        tab.set_costs(phase1)
        tab.run(allow=[True] * tab.ncols, max_iterations=budget)
        if tab.phase1_infeasible():
            return SimplexResult("infeasible", None, None, tab.iterations)
        tab.evict_artificials()

    full_cost = np.zeros(tab.ncols, dtype=dtype)
    for j in range(nstruct):
        full_cost[j] = lift(c[j])
    tab.set_costs(full_cost)
    allow = [j < tab.n_real for j in range(tab.ncols)]
    tab.stall = 0
    tab.run(allow=allow, max_iterations=budget)

    z = tab.solution()
    _verify(A[:, : tab.n_real], b, z, lo, hi, tab.n_real, exact)
    x = z[:nstruct]
    objective = sum(full_cost[j] * z[j] for j in range(nstruct))
    snapshot = Basis(basic=tuple(tab.basic), statuses=tuple(int(s) for s in tab.status[: tab.n_real]))
    return SimplexResult("optimal", x, objective, tab.iterations, snapshot)


def _try_warm_start(tab: _Tableau, basis: Basis) -> bool:
    """Rebuild the tableau from a previous basis; reject anything infeasible."""
    if len(basis.basic) != tab.m or len(basis.statuses) != tab.n_real:
        return False
    if any(col >= tab.n_real for col in basis.basic):
        return False
    B = tab.A[:, list(basis.basic)].astype(float)
    try:
        Binv = np.linalg.inv(B)
    except np.linalg.LinAlgError:
        return False
    for j in range(tab.n_real):
        tab.status[j] = basis.statuses[j]
    for col in basis.basic:
        tab.status[col] = BASIC
    z = tab.nonbasic_values()
    for col in basis.basic:
        z[col] = 0.0
    beta = Binv @ (tab.b - tab.A[:, : tab.n_real] @ z)
    for i, col in enumerate(basis.basic):
        lo, hi = tab.lo[col], tab.hi[col]
        if beta[i] < lo - FEAS_TOL or (hi is not None and beta[i] > hi + FEAS_TOL):
            for j in range(tab.n_real):
                tab.status[j] = AT_LOWER
            return False
    tab.T = Binv @ tab.A
    tab.beta = beta
    tab.basic = list(basis.basic)
    for j in range(tab.n_real, tab.ncols):
        tab.excluded[j] = True
    return True


def _verify(A, b, z, lo, hi, n_real, exact):
    if exact:
        tol = bound_tol = 0
    else:
        scale = max(1.0, max((abs(float(v)) for v in b), default=1.0))
        tol = FEAS_TOL * scale
        bound_tol = FEAS_TOL
    resid = A @ z - b
    worst = max((abs(v) for v in resid), default=0)
    if worst > tol:
        raise SimplexFailure(f"solution violates constraints by {worst}")
    for j in range(n_real):
        low, high = lo[j], hi[j]
        if z[j] < low - bound_tol:
            raise SimplexFailure(f"variable {j} below lower bound")
        if high is not None and z[j] > high + bound_tol:
            raise SimplexFailure(f"variable {j} above upper bound")
