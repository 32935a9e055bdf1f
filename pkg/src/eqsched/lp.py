"""LP relaxation plumbing: backends, integrality analysis, schedule extraction.

Two interchangeable engines sit behind :func:`solve_lp`: the bundled simplex
(``"bundled"``, self-contained, with an exact-rational mode) and SciPy's HiGHS
wrapper (``"highs"``, much faster on larger models).  Both return optimal
*basic* solutions, which the rounding heuristics rely on.  ``"auto"`` picks
HiGHS when SciPy is importable and falls back to the bundled engine.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import simplex
from .instance import IDLE, Schedule
from .model import BlpModel

#: Max-norm feasibility tolerance required of any backend.
EPS_FEAS = 1e-7
#: A value within this distance of 0 or 1 counts as integral.
EPS_INT = 1e-6
#: Guard subtracted before taking ceilings of float objectives.
EPS_ROUND = 1e-6

BACKEND_ENV_VAR = "EQSCHED_LP_BACKEND"
BACKENDS = ("auto", "bundled", "highs")


class LpBackendError(RuntimeError):
    """A backend failed to produce a usable answer (not mere infeasibility)."""


@dataclass(frozen=True)
class LpProblem:
    """Sparse LP data: minimize cost over equality and >= rows with var bounds."""

    ncols: int
    cost: tuple[float, ...]
    eq_rows: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    eq_rhs: tuple[int, ...]
    ge_rows: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    ge_rhs: tuple[int, ...]
    bounds: tuple[tuple[float, Optional[float]], ...]

    def with_fixings(self, fixings: Mapping[int, int]) -> "LpProblem":
        """Pin selected variables to 0 or 1 by collapsing their bounds."""
        bounds = list(self.bounds)
        for col, value in fixings.items():
            if value not in (0, 1):
                raise ValueError(f"can only fix variables to 0 or 1, got {value}")
            bounds[col] = (float(value), float(value))
        return LpProblem(
            ncols=self.ncols,
            cost=self.cost,
            eq_rows=self.eq_rows,
            eq_rhs=self.eq_rhs,
            ge_rows=self.ge_rows,
            ge_rhs=self.ge_rhs,
            bounds=tuple(bounds),
        )


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible"
    x: Optional[np.ndarray]
    objective_value: Optional[float]
    basis: Optional[simplex.Basis] = None


@dataclass
class IntegralityReport:
    integral: bool
    j_int: frozenset[int]
    j_frac: frozenset[int]
    fractional_vars: list[tuple[int, int, int, float]] = field(default_factory=list)


def relax(model: BlpModel) -> LpProblem:
    """Drop the 0/1 restriction, keeping rows, costs and x >= 0.

    Upper bounds of 1 are implied by the assignment equalities, so plain
    nonnegativity is enough.
    """
    w = model.weight
    cost = [0.0] * model.nvars
    for (j, t), value in w.last_cost.items():
        cost[model.var_index[(j, w.p, t)]] = float(value)
    eq = [r for r in model.rows if r.is_equality]
    ge = [r for r in model.rows if not r.is_equality]
    return LpProblem(
        ncols=model.nvars,
        cost=tuple(cost),
        eq_rows=tuple((r.cols, r.coefs) for r in eq),
        eq_rhs=tuple(r.rhs for r in eq),
        ge_rows=tuple((r.cols, r.coefs) for r in ge),
        ge_rhs=tuple(r.rhs for r in ge),
        bounds=tuple((0.0, None) for _ in range(model.nvars)),
    )


def default_backend() -> str:
    choice = os.environ.get(BACKEND_ENV_VAR, "auto").lower()
    if choice not in BACKENDS:
        raise LpBackendError(f"unknown LP backend {choice!r}; pick one of {BACKENDS}")
    return choice


def _resolve(backend: Optional[str]) -> str:
    choice = (backend or default_backend()).lower()
    if choice not in BACKENDS:
        raise LpBackendError(f"unknown LP backend {choice!r}; pick one of {BACKENDS}")
    if choice != "auto":
        return choice
    try:
        import scipy.optimize  # noqa: F401
        return "highs"
    except ImportError:
        return "bundled"


def solve_lp(
    lp: LpProblem,
    backend: Optional[str] = None,
    exact: bool = False,
    basis: Optional[simplex.Basis] = None,
) -> LpSolution:
    """Solve to a basic optimum; infeasibility is a status, limits are errors."""
    engine = "bundled" if exact else _resolve(backend)
    if engine == "bundled":
        return _solve_bundled(lp, exact=exact, basis=basis)
    return _solve_highs(lp)


def _solve_bundled(lp: LpProblem, exact: bool, basis: Optional[simplex.Basis]) -> LpSolution:
    result = simplex.solve_bounded(
        c=lp.cost,
        eq_rows=lp.eq_rows,
        eq_rhs=lp.eq_rhs,
        ge_rows=lp.ge_rows,
        ge_rhs=lp.ge_rhs,
        bounds=lp.bounds,
        exact=exact,
        basis=basis,
    )
    if result.status == "infeasible":
        return LpSolution("infeasible", None, None)
    x = result.x if exact else np.asarray(result.x, dtype=float)
    return LpSolution("optimal", x, result.objective, result.basis)


def _solve_highs(lp: LpProblem) -> LpSolution:
    import scipy.optimize
    import scipy.sparse

    def matrix(rows):
        data, ri, ci = [], [], []
        for i, (cols, coefs) in enumerate(rows):
            for c, a in zip(cols, coefs):
                ri.append(i)
                ci.append(c)
                data.append(float(a))
        return scipy.sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), lp.ncols))

    kwargs = {}
    if lp.eq_rows:
        kwargs["A_eq"] = matrix(lp.eq_rows)
        kwargs["b_eq"] = np.asarray(lp.eq_rhs, dtype=float)
    if lp.ge_rows:
        # HiGHS wants <=; flip the >= rows.
        ub = matrix(lp.ge_rows)
        kwargs["A_ub"] = -ub
        kwargs["b_ub"] = -np.asarray(lp.ge_rhs, dtype=float)
    res = scipy.optimize.linprog(
        c=np.asarray(lp.cost, dtype=float),
        bounds=[(lo, hi) for lo, hi in lp.bounds],
        method="highs-ds",
        **kwargs,
    )
    if res.status == 2:
        return LpSolution("infeasible", None, None)
    if res.status != 0:
        raise LpBackendError(f"HiGHS returned status {res.status}: {res.message}")
    return LpSolution("optimal", np.asarray(res.x, dtype=float), float(res.fun))


def analyze_integrality(model: BlpModel, sol: LpSolution, eps_int: float = EPS_INT) -> IntegralityReport:
    """Partition jobs into all-integral and at-least-one-fractional sets."""
    if sol.status != "optimal":
        raise ValueError("integrality analysis needs an optimal solution")
    fractional = []
    frac_jobs = set()
    for idx, (j, k, t) in enumerate(model.variables):
        v = float(sol.x[idx])
        if min(abs(v), abs(v - 1.0)) > eps_int:
            fractional.append((j, k, t, v))
            frac_jobs.add(j)
    all_jobs = set(range(1, model.weight.n + 1))
    return IntegralityReport(
        integral=not frac_jobs,
        j_int=frozenset(all_jobs - frac_jobs),
        j_frac=frozenset(frac_jobs),
        fractional_vars=fractional,
    )


def extract_schedule(model: BlpModel, sol: LpSolution, eps_int: float = EPS_INT) -> Schedule:
    """Turn an integral solution into the schedule it encodes."""
    slots = [IDLE] * model.weight.ncols
    for idx, (j, k, t) in enumerate(model.variables):
        v = float(sol.x[idx])
        if v > 1.0 - eps_int:
            if slots[t - 1] != IDLE:
                raise ValueError(f"interval {t} is claimed twice; solution is not integral")
            slots[t - 1] = j
    if any(s == IDLE for s in slots):
        raise ValueError("solution does not cover every interval; not integral")
    return Schedule.of(slots)


def encode_schedule(model: BlpModel, schedule: Schedule) -> np.ndarray:
    """Inverse of :func:`extract_schedule`: 0/1 vector of a concrete schedule."""
    x = np.zeros(model.nvars, dtype=float)
    seen: dict[int, int] = {}
    for t, jid in enumerate(schedule.slots, start=1):
        if jid == IDLE:
            continue
        k = seen.get(jid, 0) + 1
        seen[jid] = k
        key = (jid, k, t)
        if key not in model.var_index:
            raise ValueError(f"schedule places part {k} of job {jid} outside its domain at {t}")
        x[model.var_index[key]] = 1.0
    return x


def lower_bound_int(sol: LpSolution, eps_round: float = EPS_ROUND) -> int:
    """Integer lower bound: ceil of the LP value, guarded against float noise.

    Valid because all costs are integers, so the 0/1 optimum is an integer no
    smaller than the relaxation value.
    """
    if sol.status != "optimal":
        raise ValueError("no lower bound: solution is not optimal")
    return math.ceil(float(sol.objective_value) - eps_round)
