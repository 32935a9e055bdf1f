"""Feasible-schedule constructors: WSRPT and the two LP rounding heuristics.

All three run on idle-free instances (decompose first).  The rounding
heuristics read an optimal relaxation solution, keep the jobs whose variables
are already 0/1 exactly where the solution puts them, and place the remaining
jobs whole, guided by the nonzero last-part variables.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping, Optional

from .instance import IDLE, Instance, Schedule
from .lp import EPS_INT, LpSolution, analyze_integrality
from .model import BlpModel


def wsrpt(inst: Instance) -> Schedule:
    """Weighted shortest remaining processing time rule on the unit grid.

    Interval by interval, run the released unfinished job with the smallest
    remaining-work-to-weight ratio; ties prefer less remaining work, then the
    larger weight, then the smaller id.  Requires an idle-free instance.
    """
    remaining = {job.id: inst.p for job in inst.jobs}
    slots = []
    for t in range(1, inst.horizon + 1):
        pick = None
        for job in inst.jobs:
            left = remaining[job.id]
            if left == 0 or job.release > t:
                continue
            if pick is None:
                pick = job
                continue
            lhs = left * pick.weight  # compare left/w < best by cross-multiplying
            rhs = remaining[pick.id] * job.weight
            if lhs < rhs or (lhs == rhs and (left, -job.weight, job.id) < (remaining[pick.id], -pick.weight, pick.id)):
                pick = job
        if pick is None:
            raise ValueError(f"no released job at interval {t}; decompose the instance first")
        remaining[pick.id] -= 1
        slots.append(pick.id)
    return Schedule.of(slots)


def edf_with_completions(inst: Instance, targets: Mapping[int, int]) -> Optional[Schedule]:
    """Build a schedule finishing each job exactly at its target, or ``None``.

    Pins every job's last part at its target interval, then fills in the other
    p-1 parts earliest-first in target order, i.e. the deadline-driven
    feasibility construction with targets as deadlines.  Returns ``None`` iff
    no schedule attains the targets exactly.
    """
    horizon = inst.horizon
    if set(targets) != {job.id for job in inst.jobs}:
        raise ValueError("targets must cover every job exactly once")
    slots = [IDLE] * horizon
    for jid, target in targets.items():
        if not 1 <= target <= horizon:
            raise ValueError(f"target {target} for job {jid} is outside 1..{horizon}")
        if target < inst.job(jid).release + inst.p - 1:
            return None
        if slots[target - 1] != IDLE:
            return None  # two jobs cannot finish in the same interval
        slots[target - 1] = jid
    for jid in sorted(targets, key=lambda j: (targets[j], j)):
        release = inst.job(jid).release
        need = inst.p - 1
        for t in range(release, targets[jid]):
            if need == 0:
                break
            if slots[t - 1] == IDLE:
                slots[t - 1] = jid
                need -= 1
        if need:
            return None
    return Schedule.of(slots)


def _place_integral_jobs(model: BlpModel, sol: LpSolution, jobs: frozenset[int], eps_int: float) -> list[int]:
    slots = [IDLE] * model.weight.ncols
    for idx, (j, k, t) in enumerate(model.variables):
        if j in jobs and float(sol.x[idx]) > 1.0 - eps_int:
            if slots[t - 1] != IDLE:
                raise ValueError(f"interval {t} doubly used by integral jobs")
            slots[t - 1] = j
    return slots


def _fill_earliest(slots: list[int], jid: int, first: int, count: int, limit: Optional[int] = None) -> bool:
    """Put ``count`` units of ``jid`` into the earliest free slots >= first.

    With ``limit``, only slots <= limit qualify and nothing is written unless
    all units fit.
    """
    last = limit if limit is not None else len(slots)
    free = [t for t in range(first, last + 1) if slots[t - 1] == IDLE]
    if len(free) < count:
        return False
    for t in free[:count]:
        slots[t - 1] = jid
    return True


def _last_part_support(model: BlpModel, sol: LpSolution, eps_int: float) -> dict[int, list[int]]:
    """Per job, the ascending intervals where the last part has weight > eps."""
    support: dict[int, list[int]] = {}
    p = model.weight.p
    for idx, (j, k, t) in enumerate(model.variables):
        if k == p and float(sol.x[idx]) > eps_int:
            support.setdefault(j, []).append(t)
    for ts in support.values():
        ts.sort()
    return support


def algorithm1(model: BlpModel, sol: LpSolution, eps_int: float = EPS_INT) -> Schedule:
    """Rounding by estimated completion times.

    Jobs with fractional variables get the latest interval with positive
    last-part weight as their estimated completion; they are placed whole, in
    ascending estimate order (greater weight first on ties, then smaller id),
    each into the earliest free slots at or after its release.
    """
    report = analyze_integrality(model, sol, eps_int)
    slots = _place_integral_jobs(model, sol, report.j_int, eps_int)
    support = _last_part_support(model, sol, eps_int)
    weights = model.weight
    order = sorted(
        report.j_frac,
        key=lambda j: (support[j][-1], -weights.job_weight[j - 1], j),
    )
    for j in order:
        ok = _fill_earliest(slots, j, weights.col_release[j - 1], weights.p)
        if not ok:
            raise ValueError("free slots exhausted; instance was not idle-free")
    return Schedule.of(slots)


def algorithm2(model: BlpModel, sol: LpSolution, eps_int: float = EPS_INT) -> Schedule:
    """Rounding by earliest positive last-part variables.

    Repeatedly take the unscheduled job with the smallest interval carrying a
    positive last-part value (ties: smaller id).  If the job's parts fit into
    free slots between its release and that interval, place them earliest
    first; otherwise discard that interval for the job.  After every
    successful placement the previously discarded jobs get retried first, in
    the order they failed.  Jobs left over when all candidates are exhausted
    are placed earliest-first without the time cap.
    """
    report = analyze_integrality(model, sol, eps_int)
    slots = _place_integral_jobs(model, sol, report.j_int, eps_int)
    weights = model.weight
    support = _last_part_support(model, sol, eps_int)
    pending = set(report.j_frac)
    cursor = {j: 0 for j in pending}  # next candidate index into support[j]
    retry: deque[int] = deque()

    def attempt(j: int) -> bool:
        t = support[j][cursor[j]]
        placed = _fill_earliest(slots, j, weights.col_release[j - 1], weights.p, limit=t)
        if placed:
            pending.discard(j)
            return True
        cursor[j] += 1
        if j not in retry:
            retry.append(j)
        return False

    while True:
        live = [j for j in pending if cursor[j] < len(support[j])]
        if not live:
            break
        j = min(live, key=lambda jid: (support[jid][cursor[jid]], jid))
        if not attempt(j):
            continue
        # Retry earlier rejects, first-failed first, restarting after any hit.
        progress = True
        while progress:
            progress = False
            for _ in range(len(retry)):
                cand = retry.popleft()
                if cand not in pending or cursor[cand] >= len(support[cand]):
                    continue
                if attempt(cand):
                    progress = True
                    break
                # attempt() already re-queued it with the next candidate

    for j in sorted(pending, key=lambda jid: (support[jid][0], jid)):
        if not _fill_earliest(slots, j, weights.col_release[j - 1], weights.p):
            raise ValueError("free slots exhausted; instance was not idle-free")
    return Schedule.of(slots)
