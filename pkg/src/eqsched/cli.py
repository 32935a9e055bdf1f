"""Command-line front end: generate, solve, verify and benchmark instances.

Exit codes: 0 = success / certified optimum, 2 = resource limit hit before the
optimum was certified, 3 = input error (unparseable or invalid files, bad
arguments).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bnb import SolveLimits, solve, solve_with_root_stats
from .instance import (
    ParseError,
    count_preemptions,
    decompose_idle,
    format_instance,
    format_schedule,
    generate_instance,
    objective_twct,
    parse_instance,
    parse_schedule,
    validate_instance,
    validate_schedule,
)
from .lp import BACKENDS, EPS_INT
from .model import ObjectiveSpec, build_model, build_weights, write_lp_format
from .oracle import MAX_HORIZON, brute_force

EXIT_OK = 0
EXIT_LIMIT = 2
EXIT_INPUT = 3


@dataclasses.dataclass
class BenchRow:
    """One benchmark line: heuristic hit rates and solve effort for an (n, p)."""

    n: int
    p: int
    instances: int
    wsrpt_optimal_count: int
    lp_integral_count: int
    alg1_optimal_count: int
    alg2_optimal_count: int
    mean_preemptions: float
    mean_time_seconds: float
    limit_hits: int


def _instance_seed(base: int, n: int, p: int, index: int) -> int:
    """Stable per-instance seed derived from the run seed and coordinates."""
    return int(np.random.SeedSequence([base, n, p, index]).generate_state(1)[0])


def cmd_generate(args) -> int:
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out_dir}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        for i in range(args.count):
            inst = generate_instance(args.n, args.p, _instance_seed(args.seed, args.n, args.p, i))
            path = out_dir / f"inst_{args.n}_{args.p}_{args.seed}_{i}.txt"
            path.write_text(format_instance(inst))
            print(path)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _load_instance(path: str):
    text = Path(path).read_text()
    inst = parse_instance(text)
    problems = validate_instance(inst)
    if problems:
        raise ValueError(f"{path}: " + "; ".join(problems))
    return inst


def cmd_solve(args) -> int:
    try:
        inst = _load_instance(args.instance)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.emit_lp:
        model = build_model(build_weights(inst, ObjectiveSpec.twct()))
        Path(args.emit_lp).write_text(write_lp_format(model))

    on_event = None
    if args.verbose:
        def on_event(event):
            print(" ".join(f"{k}={v}" for k, v in event.items()), file=sys.stderr)

    limits = SolveLimits(time_limit=args.time_limit, node_limit=args.node_limit)
    report = solve(
        inst,
        limits=limits,
        backend=args.backend,
        eps_int=args.eps_int,
        on_event=on_event,
        use_root_heuristics=not args.no_root_heuristics,
    )

    print(f"instance: {args.instance}")
    print(f"n: {inst.n}")
    print(f"p: {inst.p}")
    print(f"objective: {report.objective}")
    print(f"lower_bound: {report.lower_bound:.6f}")
    print(f"method: {report.method}")
    print(f"preemptions: {report.preemptions}")
    print(f"nodes: {report.nodes_explored}")
    print(f"certified: {'true' if report.certified else 'false'}")
    print(f"wall_time_s: {report.wall_time:.6f}")
    print(f"schedule: {format_schedule(report.schedule)}", end="")

    if args.oracle:
        try:
            reference = brute_force(inst, max_horizon=args.oracle_cap)
        except ValueError as exc:
            print(f"error: oracle refused: {exc}", file=sys.stderr)
            return EXIT_INPUT
        agree = reference.optimum == report.objective
        print(f"oracle_optimum: {reference.optimum}")
        print(f"oracle_agrees: {'true' if agree else 'false'}")
        if not agree and report.certified:
            print("error: certified objective disagrees with the oracle", file=sys.stderr)
            return EXIT_INPUT

    return EXIT_OK if report.certified else EXIT_LIMIT


def cmd_verify(args) -> int:
    try:
        inst = _load_instance(args.instance)
        schedule = parse_schedule(Path(args.schedule).read_text())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        problems = validate_schedule(inst, schedule)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if problems:
        for item in problems:
            print(f"violation: {item}")
        return EXIT_INPUT
    print("ok")
    print(f"objective: {objective_twct(inst, schedule)}")
    print(f"preemptions: {count_preemptions(schedule)}")
    return EXIT_OK


def _bench_one(task):
    n, p, seed, index, time_limit, node_limit, backend, eps_int = task
    inst = generate_instance(n, p, _instance_seed(seed, n, p, index))
    report, stats = solve_with_root_stats(
        inst,
        limits=SolveLimits(time_limit=time_limit, node_limit=node_limit),
        backend=backend,
        eps_int=eps_int,
    )
    return {
        "optimal": report.objective,
        "certified": report.certified,
        "lp_integral": stats.lp_integral,
        "wsrpt": stats.wsrpt_objective,
        "alg1": stats.alg1_objective,
        "alg2": stats.alg2_objective,
        "preemptions": report.preemptions,
        "time": report.wall_time,
    }


def cmd_bench(args) -> int:
    try:
        n_list = [int(v) for v in args.n_list.split(",") if v]
        p_list = [int(v) for v in args.p_list.split(",") if v]
    except ValueError:
        print("error: --n-list/--p-list must be comma-separated integers", file=sys.stderr)
        return EXIT_INPUT
    if not n_list or not p_list or args.count < 1:
        print("error: need at least one n, one p and count >= 1", file=sys.stderr)
        return EXIT_INPUT

    rows = []
    for n in sorted(n_list):
        for p in sorted(p_list):
            tasks = [
                (n, p, args.seed, i, args.time_limit, args.node_limit, args.backend, args.eps_int)
                for i in range(args.count)
            ]
            try:
                if args.workers > 1:
                    import multiprocessing

                    with multiprocessing.Pool(args.workers) as pool:
                        results = pool.map(_bench_one, tasks)
                else:
                    results = [_bench_one(t) for t in tasks]
            except ValueError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_INPUT
            certified = [r for r in results if r["certified"]]
            rows.append(
                BenchRow(
                    n=n,
                    p=p,
                    instances=len(results),
                    wsrpt_optimal_count=sum(1 for r in certified if r["wsrpt"] == r["optimal"]),
                    lp_integral_count=sum(1 for r in results if r["lp_integral"]),
                    alg1_optimal_count=sum(1 for r in certified if r["alg1"] == r["optimal"]),
                    alg2_optimal_count=sum(1 for r in certified if r["alg2"] == r["optimal"]),
                    mean_preemptions=sum(r["preemptions"] for r in results) / len(results),
                    mean_time_seconds=sum(r["time"] for r in results) / len(results),
                    limit_hits=sum(1 for r in results if not r["certified"]),
                )
            )
            print(f"bench n={n} p={p}: done ({len(results)} instances)", file=sys.stderr)

    fields = [f.name for f in dataclasses.fields(BenchRow)]
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(fields)
        for row in rows:
            writer.writerow([getattr(row, name) for name in fields])
    print(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqsched",
        description="Preemptive single-machine scheduling of equal-length jobs: "
        "exact solver, heuristics, instance tools.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(sp):
        sp.add_argument("--backend", choices=BACKENDS, default=None, help="LP engine (default: env or auto)")
        sp.add_argument("--time-limit", type=float, default=60.0, help="seconds before giving up on certification")
        sp.add_argument("--node-limit", type=int, default=100_000, help="search nodes before giving up")
        sp.add_argument("--eps-int", type=float, default=EPS_INT, help="integrality tolerance")

    gen = sub.add_parser("generate", help="write random idle-free instance files")
    gen.add_argument("n", type=int)
    gen.add_argument("p", type=int)
    gen.add_argument("count", type=int)
    gen.add_argument("seed", type=int)
    gen.add_argument("out_dir")
    gen.set_defaults(func=cmd_generate)

    slv = sub.add_parser("solve", help="solve one instance file to certified optimality")
    slv.add_argument("instance")
    add_solver_flags(slv)
    slv.add_argument("--emit-lp", metavar="PATH", help="also write the model in LP interchange format")
    slv.add_argument("--oracle", action="store_true", help="cross-check against exhaustive enumeration")
    slv.add_argument("--oracle-cap", type=int, default=MAX_HORIZON, help="largest horizon the oracle accepts")
    slv.add_argument("--no-root-heuristics", action="store_true",
                     help="skip WSRPT/rounding at the root (debugging the search)")
    slv.add_argument("--verbose", action="store_true", help="stream search events to stderr")
    slv.set_defaults(func=cmd_solve)

    ver = sub.add_parser("verify", help="check a schedule file against an instance file")
    ver.add_argument("instance")
    ver.add_argument("schedule")
    ver.set_defaults(func=cmd_verify)

    ben = sub.add_parser("bench", help="solve batches of generated instances, write a CSV summary")
    ben.add_argument("--n-list", required=True, help="comma-separated job counts, e.g. 10,14")
    ben.add_argument("--p-list", required=True, help="comma-separated processing times, e.g. 2,3")
    ben.add_argument("--count", type=int, default=100, help="instances per (n, p) cell")
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--out", required=True, help="CSV output path")
    ben.add_argument("--workers", type=int, default=1, help="parallel solver processes")
    add_solver_flags(ben)
    ben.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
