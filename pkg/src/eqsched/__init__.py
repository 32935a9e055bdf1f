"""Preemptive single-machine scheduling of equal-length jobs with release dates.

Exact branch-and-bound solver built on a time-indexed 0/1 model whose LP
relaxation is almost always integral, plus WSRPT and two LP rounding
heuristics, a seeded instance generator, and an exhaustive oracle for
verification.
"""

__version__ = "0.1.0"

from .bnb import (
    Incumbent,
    SolveLimits,
    SolveReport,
    branch_variable,
    solve,
    solve_exact,
    update_incumbent,
)
from .heuristics import algorithm1, algorithm2, edf_with_completions, wsrpt
from .instance import (
    IDLE,
    Block,
    Instance,
    Job,
    Schedule,
    completion_times,
    count_preemptions,
    decompose_idle,
    format_instance,
    format_schedule,
    generate_instance,
    objective_twct,
    parse_instance,
    parse_schedule,
    requires_idle,
    validate_instance,
    validate_schedule,
)
from .lp import (
    EPS_FEAS,
    EPS_INT,
    EPS_ROUND,
    IntegralityReport,
    LpProblem,
    LpSolution,
    analyze_integrality,
    extract_schedule,
    lower_bound_int,
    relax,
    solve_lp,
)
from .model import (
    BlpModel,
    ModelInfeasibleError,
    ObjectiveKind,
    ObjectiveSpec,
    WeightMatrix,
    big_m_value,
    build_model,
    build_weights,
    t_ab,
    write_lp_format,
)
from .oracle import OracleResult, brute_force, enumerate_feasible

__all__ = [name for name in dir() if not name.startswith("_")]
