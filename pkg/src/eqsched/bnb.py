"""Exact solver: root relaxation, three constructive heuristics, then search.

Most instances end at the root: the relaxation is integral, or one of the
heuristics matches the rounded-up relaxation value.  The remaining ones go
through a best-first branch and bound that pins the largest fractional
variable to 0 or 1, solves the restricted relaxation per node, reruns the two
rounding heuristics on the node solution, and prunes nodes whose bound already
reaches the incumbent objective.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .heuristics import algorithm1, algorithm2, wsrpt
from .instance import (
    Instance,
    Schedule,
    assemble_schedule,
    count_preemptions,
    decompose_idle,
    objective_twct,
    requires_idle,
    validate_instance,
)
from .lp import (
    EPS_INT,
    IntegralityReport,
    LpSolution,
    analyze_integrality,
    extract_schedule,
    lower_bound_int,
    relax,
    solve_lp,
)
from .model import ObjectiveKind, ObjectiveSpec, build_model, build_weights

EventCallback = Callable[[dict], None]


@dataclass
class SolveLimits:
    time_limit: float = 60.0
    node_limit: int = 100_000


@dataclass
class SolveReport:
    schedule: Schedule
    objective: int
    lower_bound: float
    nodes_explored: int
    preemptions: int
    wall_time: float
    method: str
    certified: bool


@dataclass
class RootStats:
    """Per-instance facts the benchmark tables are made of."""

    lp_value: float
    lp_integral: bool
    wsrpt_objective: int
    alg1_objective: Optional[int]
    alg2_objective: Optional[int]


@dataclass
class Incumbent:
    schedule: Schedule
    objective: int
    preemptions: int
    source: str


@dataclass(frozen=True)
class Node:
    """One open subproblem: branch fixings plus the best bound known for it."""

    fixings: tuple[tuple[int, int], ...]
    bound: float
    depth: int


def update_incumbent(
    current: Optional[Incumbent], candidate: Schedule, inst: Instance, source: str = "candidate"
) -> Incumbent:
    """Keep the better schedule: smaller objective, then fewer preemptions."""
    return _update(current, candidate, inst, ObjectiveSpec.twct(), source)


def branch_variable(report: IntegralityReport) -> tuple[int, int, int]:
    """The fractional variable with the largest value; ties by smallest (j,k,t)."""
    if report.integral:
        raise ValueError("nothing to branch on: the solution is integral")
    best = max(report.fractional_vars, key=lambda jktv: (jktv[3], tuple(-c for c in jktv[:3])))
    return best[:3]


def solve_exact(
    inst: Instance,
    limits: Optional[SolveLimits] = None,
    backend: Optional[str] = None,
    eps_int: float = EPS_INT,
    objective: Optional[ObjectiveSpec] = None,
    on_event: Optional[EventCallback] = None,
    use_root_heuristics: bool = True,
) -> SolveReport:
    """Solve one idle-free instance to certified optimality (or a limit).

    ``use_root_heuristics=False`` skips WSRPT/rounding at the root, forcing
    any fractional instance into the tree; useful for exercising and studying
    the search itself.
    """
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))
    if requires_idle(inst):
        raise ValueError("instance requires idle time; decompose it first (see solve())")
    spec = objective or ObjectiveSpec.twct()
    if spec.unavailable:
        raise NotImplementedError("solve_exact does not handle unavailability periods")

    limits = limits or SolveLimits()
    started = time.perf_counter()
    deadline = started + limits.time_limit

    model = build_model(build_weights(inst, spec))
    lp0 = relax(model)
    root = solve_lp(lp0, backend=backend)
    if root.status != "optimal":
        raise RuntimeError("root relaxation infeasible for a valid idle-free instance")
    nodes = 1
    root_value = float(root.objective_value)
    root_floor = lower_bound_int(root)
    report = analyze_integrality(model, root, eps_int)

    def emit(kind: str, **extra) -> None:
        if on_event:
            on_event({"event": kind, "nodes": nodes, **extra})

    def finish(inc: Incumbent, certified: bool, lower: float) -> SolveReport:
        return SolveReport(
            schedule=inc.schedule,
            objective=inc.objective,
            lower_bound=lower,
            nodes_explored=nodes,
            preemptions=inc.preemptions,
            wall_time=time.perf_counter() - started,
            method=inc.source,
            certified=certified,
        )

    emit("root", bound=root_value, integral=report.integral)
    if report.integral:
        schedule = extract_schedule(model, root, eps_int)
        inc = Incumbent(schedule, _objective_of(inst, spec, schedule), count_preemptions(schedule), "integral-LP")
        return finish(inc, certified=True, lower=root_value)

    incumbent: Optional[Incumbent] = None
    if use_root_heuristics:
        if spec.kind is ObjectiveKind.TWCT:
            incumbent = _update(incumbent, wsrpt(inst), inst, spec, "WSRPT")
        incumbent = _update(incumbent, algorithm1(model, root, eps_int), inst, spec, "Alg1")
        incumbent = _update(incumbent, algorithm2(model, root, eps_int), inst, spec, "Alg2")
        emit("root-heuristics", incumbent=incumbent.objective, bound=root_floor)
        if incumbent.objective <= root_floor:
            return finish(incumbent, certified=True, lower=root_value)

    # Best-first search; ties prefer deeper nodes, then earlier creation.
    counter = 0
    heap: list[tuple[float, int, int, Node]] = []

    def push(node: Node) -> None:
        nonlocal counter
        counter += 1
        heapq.heappush(heap, (node.bound, -node.depth, counter, node))

    j, k, t = branch_variable(report)
    col = model.var_index[(j, k, t)]
    for value in (0, 1):
        push(Node(fixings=((col, value),), bound=root_value, depth=1))

    limit_hit = False
    while heap:
        if nodes >= limits.node_limit or time.perf_counter() > deadline:
            limit_hit = True
            break
        bound, _, _, node = heapq.heappop(heap)
        if incumbent is not None and math.ceil(bound - 1e-6) >= incumbent.objective:
            continue  # stale: bound caught up with the incumbent
        sol = solve_lp(lp0.with_fixings(dict(node.fixings)), backend=backend)
        nodes += 1
        if sol.status != "optimal":
            emit("node-infeasible", depth=node.depth)
            continue
        node_floor = lower_bound_int(sol)
        if incumbent is not None and node_floor >= incumbent.objective:
            emit("node-pruned", bound=float(sol.objective_value), depth=node.depth)
            continue
        node_report = analyze_integrality(model, sol, eps_int)
        if node_report.integral:
            incumbent = _update(incumbent, extract_schedule(model, sol, eps_int), inst, spec, "BnB")
            emit("node-integral", incumbent=incumbent.objective, depth=node.depth)
            continue
        incumbent = _update(incumbent, algorithm1(model, sol, eps_int), inst, spec, "Alg1")
        incumbent = _update(incumbent, algorithm2(model, sol, eps_int), inst, spec, "Alg2")
        emit("node", bound=float(sol.objective_value), incumbent=incumbent.objective, depth=node.depth)
        if node_floor >= incumbent.objective:
            continue
        j, k, t = branch_variable(node_report)
        col = model.var_index[(j, k, t)]
        for value in (0, 1):
            push(Node(fixings=node.fixings + ((col, value),), bound=float(sol.objective_value), depth=node.depth + 1))

    if incumbent is None:
        # Only reachable when root heuristics were skipped and a limit struck
        # before the first node: fall back so the report still carries a schedule.
        if spec.kind is ObjectiveKind.TWCT:
            incumbent = _update(incumbent, wsrpt(inst), inst, spec, "WSRPT")
        incumbent = _update(incumbent, algorithm1(model, root, eps_int), inst, spec, "Alg1")
    if limit_hit:
        open_bounds = [entry[0] for entry in heap]
        lower = min(open_bounds + [float(incumbent.objective)])
        return finish(incumbent, certified=False, lower=lower)
    return finish(incumbent, certified=True, lower=float(incumbent.objective))


def _objective_of(inst: Instance, spec: ObjectiveSpec, schedule: Schedule) -> int:
    if spec.kind is ObjectiveKind.TWCT:
        return objective_twct(inst, schedule)
    from .instance import completion_times

    finished = completion_times(schedule)
    return sum(spec.last_part_cost(job.weight, job.id, finished[job.id]) for job in inst.jobs)


def _update(
    current: Optional[Incumbent], candidate: Schedule, inst: Instance, spec: ObjectiveSpec, source: str
) -> Incumbent:
    objective = _objective_of(inst, spec, candidate)
    preemptions = count_preemptions(candidate)
    if (
        current is None
        or objective < current.objective
        or (objective == current.objective and preemptions < current.preemptions)
    ):
        return Incumbent(candidate, objective, preemptions, source)
    return current


def solve(
    inst: Instance,
    limits: Optional[SolveLimits] = None,
    backend: Optional[str] = None,
    eps_int: float = EPS_INT,
    on_event: Optional[EventCallback] = None,
    use_root_heuristics: bool = True,
) -> SolveReport:
    """Full pipeline: split at forced idle intervals, solve blocks, reassemble."""
    started = time.perf_counter()
    blocks = decompose_idle(inst)
    reports = []
    for block in blocks:
        reports.append(
            solve_exact(
                block.instance,
                limits=limits,
                backend=backend,
                eps_int=eps_int,
                on_event=on_event,
                use_root_heuristics=use_root_heuristics,
            )
        )
    schedule = assemble_schedule(inst, blocks, [r.schedule for r in reports])
    lower = 0.0
    for block, rep in zip(blocks, reports):
        shift = block.offset * sum(block.instance.weights())
        lower += rep.lower_bound + shift
    methods = []
    for rep in reports:
        if rep.method not in methods:
            methods.append(rep.method)
    return SolveReport(
        schedule=schedule,
        objective=objective_twct(inst, schedule),
        lower_bound=lower,
        nodes_explored=sum(r.nodes_explored for r in reports),
        preemptions=count_preemptions(schedule),
        wall_time=time.perf_counter() - started,
        method="+".join(methods),
        certified=all(r.certified for r in reports),
    )


def solve_with_root_stats(
    inst: Instance,
    limits: Optional[SolveLimits] = None,
    backend: Optional[str] = None,
    eps_int: float = EPS_INT,
) -> tuple[SolveReport, RootStats]:
    """Solve a single-block instance and also report how the root fared.

    Runs every heuristic regardless of whether the relaxation was integral,
    so benchmark counts cover all instances.
    """
    if requires_idle(inst):
        raise ValueError("root statistics are defined for idle-free instances only")
    model = build_model(build_weights(inst, ObjectiveSpec.twct()))
    root = solve_lp(relax(model), backend=backend)
    if root.status != "optimal":
        raise RuntimeError("root relaxation infeasible for a valid idle-free instance")
    report = analyze_integrality(model, root, eps_int)
    stats = RootStats(
        lp_value=float(root.objective_value),
        lp_integral=report.integral,
        wsrpt_objective=objective_twct(inst, wsrpt(inst)),
        alg1_objective=objective_twct(inst, algorithm1(model, root, eps_int)),
        alg2_objective=objective_twct(inst, algorithm2(model, root, eps_int)),
    )
    full = solve_exact(inst, limits=limits, backend=backend, eps_int=eps_int)
    return full, stats
