"""Independent exact reference solver by exhaustive depth-first enumeration.

The search assigns unit intervals 1, 2, ... in order, branching over every
released, unfinished job for the next interval (idle is taken only when no
such job exists).  It never touches the LP machinery, which makes it the
trusted yardstick for the model, the heuristics and the branch and bound on
small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .instance import IDLE, Instance, Schedule, count_preemptions, expected_length

#: Default refusal threshold; enumeration grows factorially with the horizon.
MAX_HORIZON = 14


@dataclass
class OracleResult:
    optimum: int
    schedule: Schedule
    all_optima: Optional[list[Schedule]] = None
    min_preemptions: Optional[int] = None


def _completion_cost(inst: Instance) -> Callable[[int, int], int]:
    weights = [0] + list(inst.weights())
    return lambda jid, t: weights[jid] * t


def brute_force(
    inst: Instance,
    enumerate_all: bool = False,
    max_horizon: int = MAX_HORIZON,
    completion_cost: Callable[[int, int], int] | None = None,
) -> OracleResult:
    """Exhaustively minimize the total completion cost over all schedules.

    ``completion_cost(job_id, t)`` is charged when a job finishes in interval
    ``t`` and defaults to ``w_j * t`` (total weighted completion time).  With
    ``enumerate_all`` the full set of optimal schedules is returned together
    with the fewest preemptions among them.

    The default search is deliberately plain -- no bounds, no pruning -- so
    its verdicts depend on nothing but the enumeration itself.
    """
    horizon = expected_length(inst)
    if horizon > max_horizon:
        raise ValueError(f"horizon {horizon} exceeds the enumeration cap {max_horizon}")
    cost_of = completion_cost or _completion_cost(inst)

    releases = inst.releases()
    remaining = [0] + [inst.p] * inst.n
    slots: list[int] = []
    best = [None]  # type: list[int | None]
    best_slots: list[tuple[int, ...]] = []

    def dfs(t: int, unfinished: int, cost: int) -> None:
        if unfinished == 0:
            if best[0] is None or cost < best[0]:
                best[0] = cost
                best_slots.clear()
                best_slots.append(tuple(slots))
            elif enumerate_all and cost == best[0]:
                best_slots.append(tuple(slots))
            return
        moved = False
        for jid in range(1, inst.n + 1):
            if remaining[jid] > 0 and releases[jid - 1] <= t:
                moved = True
                remaining[jid] -= 1
                slots.append(jid)
                extra = cost_of(jid, t) if remaining[jid] == 0 else 0
                dfs(t + 1, unfinished - (1 if remaining[jid] == 0 else 0), cost + extra)
                slots.pop()
                remaining[jid] += 1
        if not moved:
            slots.append(IDLE)
            dfs(t + 1, unfinished, cost)
            slots.pop()

    dfs(1, inst.n, 0)
    assert best[0] is not None
    result = OracleResult(optimum=best[0], schedule=Schedule.of(best_slots[0]))
    if enumerate_all:
        result.all_optima = [Schedule.of(s) for s in best_slots]
        result.min_preemptions = min(count_preemptions(s) for s in result.all_optima)
    return result


def brute_force_memo(
    inst: Instance,
    max_horizon: int = 20,
    completion_cost: Callable[[int, int], int] | None = None,
) -> OracleResult:
    """Exact minimum via the same enumeration collapsed over repeated states.

    The remaining-work vector at a given interval fully determines the rest of
    the search, so states can be cached.  Covers a few more intervals than
    ``brute_force``; tests cross-check the two on every size both can handle.
    """
    horizon = expected_length(inst)
    if horizon > max_horizon:
        raise ValueError(f"horizon {horizon} exceeds the enumeration cap {max_horizon}")
    cost_of = completion_cost or _completion_cost(inst)
    releases = inst.releases()
    cache: dict[tuple[int, tuple[int, ...]], int] = {}

    def value(t: int, remaining: tuple[int, ...]) -> int:
        if not any(remaining):
            return 0
        key = (t, remaining)
        hit = cache.get(key)
        if hit is not None:
            return hit
        best = None
        moved = False
        for jid in range(1, inst.n + 1):
            left = remaining[jid - 1]
            if left > 0 and releases[jid - 1] <= t:
                moved = True
                child = remaining[:jid - 1] + (left - 1,) + remaining[jid:]
                sub = value(t + 1, child) + (cost_of(jid, t) if left == 1 else 0)
                if best is None or sub < best:
                    best = sub
        if not moved:
            best = value(t + 1, remaining)
        cache[key] = best
        return best

    start = tuple([inst.p] * inst.n)
    optimum = value(1, start)

    # Rebuild one optimal schedule by walking the cached values.
    slots = []
    t, remaining, owed = 1, start, optimum
    while any(remaining):
        placed = False
        for jid in range(1, inst.n + 1):
            left = remaining[jid - 1]
            if left > 0 and releases[jid - 1] <= t:
                child = remaining[:jid - 1] + (left - 1,) + remaining[jid:]
                extra = cost_of(jid, t) if left == 1 else 0
                if value(t + 1, child) + extra == owed:
                    slots.append(jid)
                    remaining, owed = child, owed - extra
                    placed = True
                    break
        if not placed:
            slots.append(IDLE)
        t += 1
    return OracleResult(optimum=optimum, schedule=Schedule.of(slots))


def enumerate_feasible(inst: Instance, max_horizon: int = MAX_HORIZON) -> int:
    """Count the distinct valid schedules (idle only where forced)."""
    horizon = expected_length(inst)
    if horizon > max_horizon:
        raise ValueError(f"horizon {horizon} exceeds the enumeration cap {max_horizon}")
    releases = inst.releases()
    remaining = [inst.p] * inst.n

    def dfs(t: int, unfinished: int) -> int:
        if unfinished == 0:
            return 1
        total = 0
        moved = False
        for j in range(inst.n):
            if remaining[j] > 0 and releases[j] <= t:
                moved = True
                remaining[j] -= 1
                total += dfs(t + 1, unfinished - (1 if remaining[j] == 0 else 0))
                remaining[j] += 1
        if not moved:
            total = dfs(t + 1, unfinished)
        return total

    return dfs(1, inst.n)
