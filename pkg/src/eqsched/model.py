"""Time-indexed 0/1 model: cost matrix, ordering constraints, objective variants.

Each job ``j`` is split into parts ``j.1 .. j.p``; decision variable
``x[j,k,t]`` assigns part ``k`` to unit interval ``t``.  Only the last part
carries cost.  Variables that could never be 1 (before the release, too late
to finish, past a deadline) are simply not created; no big-M weights appear
anywhere in the internal pipeline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .instance import Instance


class ObjectiveKind(enum.Enum):
    TWCT = "twct"
    TOTAL_WEIGHTED_TARDINESS = "twt"
    WEIGHTED_TARDY_COUNT = "wntj"


@dataclass(frozen=True)
class ObjectiveSpec:
    """What the last job-parts cost, plus optional hard deadlines/unavailability.

    ``due_dates`` (soft) are required for the tardiness kinds and forbidden for
    plain weighted completion time.  ``deadlines`` (hard) and ``unavailable``
    intervals combine with any kind.
    """

    kind: ObjectiveKind = ObjectiveKind.TWCT
    due_dates: Optional[Mapping[int, int]] = None
    deadlines: Optional[Mapping[int, int]] = None
    unavailable: frozenset[int] = frozenset()

    @classmethod
    def twct(cls) -> "ObjectiveSpec":
        return cls()

    def check(self, inst: Instance) -> None:
        tardy = self.kind in (ObjectiveKind.TOTAL_WEIGHTED_TARDINESS, ObjectiveKind.WEIGHTED_TARDY_COUNT)
        if tardy and self.due_dates is None:
            raise ValueError(f"{self.kind.value} objective needs due dates")
        if not tardy and self.due_dates is not None:
            raise ValueError("due dates are only meaningful for tardiness objectives")
        if tardy:
            missing = [j.id for j in inst.jobs if j.id not in self.due_dates]
            if missing:
                raise ValueError(f"missing due dates for jobs {missing}")
        for jid in self.deadlines or {}:
            if not 1 <= jid <= inst.n:
                raise ValueError(f"deadline for unknown job {jid}")
        for t in self.unavailable:
            if t < 1:
                raise ValueError(f"unavailable interval indices must be >= 1, got {t}")

    def last_part_cost(self, weight: int, jid: int, t: int) -> int:
        """Cost of finishing job ``jid`` in (real) interval ``t``."""
        if self.kind is ObjectiveKind.TWCT:
            return weight * t
        due = self.due_dates[jid]
        if self.kind is ObjectiveKind.TOTAL_WEIGHTED_TARDINESS:
            return weight * max(0, t - due)
        return weight if t > due else 0


class ModelInfeasibleError(Exception):
    """No interval can host some job part (typically a too-tight deadline)."""

    def __init__(self, job: int, part: int, detail: str = ""):
        self.job = job
        self.part = part
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"no feasible interval for part {part} of job {job}{suffix}")


@dataclass(frozen=True)
class WeightMatrix:
    """Per-part interval domains and last-part costs on the valid domain.

    Columns are the schedulable intervals, renumbered 1..n*p; with
    unavailability periods they differ from real times, and ``col_time`` maps
    column index to real time (identity otherwise).  Parts ``k < p`` cost 0 on
    their domain; ``last_cost[(j, t)]`` holds the part-``p`` cost at column
    ``t``.  Anything outside ``domain`` is excluded, not priced.
    """

    n: int
    p: int
    ncols: int
    domain: Mapping[tuple[int, int], tuple[int, int]]
    last_cost: Mapping[tuple[int, int], int]
    col_time: tuple[int, ...]
    col_release: tuple[int, ...]
    job_weight: tuple[int, ...]

    def cost(self, j: int, k: int, t: int) -> int:
        lo, hi = self.domain[(j, k)]
        if not lo <= t <= hi:
            raise KeyError(f"x[{j},{k},{t}] is outside the valid domain [{lo},{hi}]")
        return self.last_cost[(j, t)] if k == self.p else 0

    def variables(self) -> Iterator[tuple[int, int, int]]:
        for j in range(1, self.n + 1):
            for k in range(1, self.p + 1):
                lo, hi = self.domain[(j, k)]
                for t in range(lo, hi + 1):
                    yield (j, k, t)


def t_ab(a: int, b: int, n: int, p: int) -> set[int]:
    """Interval subset {b, b+p, ..., b+(a-1)p}; empty when a = n and b = p."""
    if not 1 <= a <= n:
        raise ValueError(f"a must be in 1..{n}, got {a}")
    if not 1 <= b <= p:
        raise ValueError(f"b must be in 1..{p}, got {b}")
    if a == n and b == p:
        return set()
    return {b + i * p for i in range(a)}


def _schedulable_columns(inst: Instance, unavailable: frozenset[int]) -> tuple[int, ...]:
    """Real times of the first n*p intervals the machine may use."""
    times = []
    t = 0
    while len(times) < inst.horizon:
        t += 1
        if t not in unavailable:
            times.append(t)
    return tuple(times)


def build_weights(inst: Instance, spec: ObjectiveSpec | None = None) -> WeightMatrix:
    """Compute the valid domains and last-part costs for an instance.

    For the plain setting the domain of part ``k`` of job ``j`` is
    ``r_j + k - 1 <= t <= T - p + k`` except that the last part may run
    through ``T``.  Deadlines shrink the upper ends; unavailability drops the
    forbidden intervals' columns and renumbers the rest, with costs charged at
    real times.
    """
    spec = spec or ObjectiveSpec.twct()
    spec.check(inst)
    n, p, ncols = inst.n, inst.p, inst.horizon

    col_time = _schedulable_columns(inst, spec.unavailable)
    col_release = []
    for job in inst.jobs:
        first = next((c + 1 for c, real in enumerate(col_time) if real >= job.release), None)
        if first is None:
            raise ModelInfeasibleError(job.id, 1, f"release {job.release} is past the horizon")
        col_release.append(first)

    domain = {}
    for job in inst.jobs:
        j = job.id
        rel = col_release[j - 1]
        hi_last = ncols
        if spec.deadlines and j in spec.deadlines:
            deadline = spec.deadlines[j]
            hi_last = 0
            for c in range(ncols, 0, -1):
                if col_time[c - 1] <= deadline:
                    hi_last = c
                    break
        for k in range(1, p + 1):
            lo = rel + k - 1
            hi = hi_last if k == p else min(ncols - p + k, hi_last - p + k)
            if lo > hi:
                raise ModelInfeasibleError(j, k)
            domain[(j, k)] = (lo, hi)

    last_cost = {}
    for job in inst.jobs:
        lo, hi = domain[(job.id, p)]
        for t in range(lo, hi + 1):
            last_cost[(job.id, t)] = spec.last_part_cost(job.weight, job.id, col_time[t - 1])

    return WeightMatrix(
        n=n,
        p=p,
        ncols=ncols,
        domain=domain,
        last_cost=last_cost,
        col_time=col_time,
        col_release=tuple(col_release),
        job_weight=inst.weights(),
    )


@dataclass(frozen=True)
class Row:
    """One sparse constraint row.

    ``kind`` 1: part (j,k) placed exactly once (sum = 1);
    ``kind`` 2: interval t filled exactly once (sum = 1);
    ``kind`` 3: ordering row for (j, k, a, b) (sum >= 0).
    """

    kind: int
    key: tuple
    cols: tuple[int, ...]
    coefs: tuple[int, ...]

    @property
    def rhs(self) -> int:
        return 1 if self.kind in (1, 2) else 0

    @property
    def is_equality(self) -> bool:
        return self.kind in (1, 2)


@dataclass(frozen=True)
class BlpModel:
    weight: WeightMatrix
    variables: tuple[tuple[int, int, int], ...]
    var_index: Mapping[tuple[int, int, int], int]
    rows: tuple[Row, ...] = field(repr=False)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def eq_rows(self) -> list[Row]:
        return [r for r in self.rows if r.is_equality]

    def ge_rows(self) -> list[Row]:
        return [r for r in self.rows if not r.is_equality]


def build_model(weights: WeightMatrix) -> BlpModel:
    """Assemble the sparse constraint rows over the valid-domain variables.

    Ordering rows are emitted for every (j, k < p, a, b) with a nonempty
    interval subset, even when variable exclusion leaves them vacuous; they
    encode that part k+1 starts exactly 1 + (multiple of p) intervals after
    part k.
    """
    n, p, ncols = weights.n, weights.p, weights.ncols
    variables = tuple(weights.variables())
    var_index = {v: i for i, v in enumerate(variables)}

    def in_domain(j: int, k: int, t: int) -> bool:
        lo, hi = weights.domain[(j, k)]
        return lo <= t <= hi

    rows = []
    for j in range(1, n + 1):
        for k in range(1, p + 1):
            lo, hi = weights.domain[(j, k)]
            cols = tuple(var_index[(j, k, t)] for t in range(lo, hi + 1))
            if not cols:
                raise ModelInfeasibleError(j, k)
            rows.append(Row(1, (j, k), cols, (1,) * len(cols)))

    for t in range(1, ncols + 1):
        cols = tuple(
            var_index[(j, k, t)]
            for j in range(1, n + 1)
            for k in range(1, p + 1)
            if in_domain(j, k, t)
        )
        rows.append(Row(2, (t,), cols, (1,) * len(cols)))

    for j in range(1, n + 1):
        for k in range(1, p):
            for a in range(1, n + 1):
                for b in range(1, p + 1):
                    subset = t_ab(a, b, n, p)
                    if not subset:
                        continue
                    cols, coefs = [], []
                    for t in sorted(subset):
                        if in_domain(j, k, t):
                            cols.append(var_index[(j, k, t)])
                            coefs.append(1)
                        if in_domain(j, k + 1, t + 1):
                            cols.append(var_index[(j, k + 1, t + 1)])
                            coefs.append(-1)
                    rows.append(Row(3, (j, k, a, b), tuple(cols), tuple(coefs)))

    return BlpModel(weight=weights, variables=variables, var_index=var_index, rows=tuple(rows))


def big_m_value(weights: WeightMatrix) -> int:
    """1 + the sum of all finite costs; a safe stand-in for the excluded cells.

    Only for exporting dense formulations to external tooling -- the internal
    pipeline never materializes excluded variables.
    """
    return 1 + sum(weights.last_cost.values())


def var_name(j: int, k: int, t: int) -> str:
    return f"x_{j}_{k}_{t}"


def write_lp_format(model: BlpModel, binary: bool = True) -> str:
    """Render the model in CPLEX LP text format for external solvers."""
    w = model.weight
    terms = []
    for j, k, t in model.variables:
        c = w.cost(j, k, t)
        if c:
            terms.append(f"+ {c} {var_name(j, k, t)}")
    lines = ["\\ time-indexed preemptive scheduling model", "Minimize", " obj: " + (" ".join(terms) or "0")]
    lines.append("Subject To")
    counter = 0
    for row in model.rows:
        counter += 1
        parts = []
        for col, coef in zip(row.cols, row.coefs):
            j, k, t = model.variables[col]
            parts.append(f"{'+' if coef > 0 else '-'} {abs(coef)} {var_name(j, k, t)}")
        if not parts:
            continue
        op = "=" if row.is_equality else ">="
        lines.append(f" c{counter}: " + " ".join(parts) + f" {op} {row.rhs}")
    lines.append("Bounds")
    for j, k, t in model.variables:
        lines.append(f" 0 <= {var_name(j, k, t)} <= 1")
    if binary:
        lines.append("Binaries")
        for j, k, t in model.variables:
            lines.append(f" {var_name(j, k, t)}")
    lines.append("End")
    return "\n".join(lines) + "\n"
