"""Command-line entry points.

Verbs:
  generate  write a random instance to a file (.dat-s or native JSON)
  solve     run the projective solver (or the plain separation baseline)
            on an instance file and emit trace + summary reports
  project   one-shot projection oracle on a matrix pair from a JSON file
  verify    check a claimed point against an instance
  bench     run a seeds x sizes matrix of instances, parallel across runs

Exit codes: 0 converged / feasible, 2 iteration or time limit hit,
1 any error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import fileio
from .driver import SolverParams, pcp_solve, standard_cp_solve
from .instances import GenParams, generate_instance
from .model import verify_interior
from .projection import ProjectionTolerances, project_psd
from .report import RunConfig, emit_report, summary_dict

_FAMILIES = {
    # shared-pool instances with a PSD constant matrix; y = 0 is feasible
    "first": dict(eig_range_A=(9.0, 10.0), eig_range_C=(30.0, 50.0)),
    # wider, possibly indefinite coefficient spectra
    "varied": dict(eig_range_A=(-20.0, 100.0), eig_range_C=(0.0, 100.0)),
    # nonnegative variables, random objective, a fixed common null space
    "huge": dict(
        eig_range_A=(40.0, 100.0),
        eig_range_C=(10.0, 40.0),
        nonneg_y=True,
        b_mode="uniform",
    ),
}


def _add_solver_flags(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--gap-tol", type=float, default=1e-5)
    p.add_argument("--box-bound", type=float, default=1e5)
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--no-second-hit", action="store_true")
    p.add_argument("--t1", type=float, nargs="+", default=None,
                   help="separation points for the coupled projection case")


def _solver_params(args) -> SolverParams:
    tol = ProjectionTolerances(t1_list=tuple(args.t1)) if args.t1 else ProjectionTolerances()
    return SolverParams(
        alpha=args.alpha,
        gap_tol=args.gap_tol,
        box_bound=args.box_bound,
        max_iters=args.max_iters,
        time_limit=args.time_limit,
        second_hit=not args.no_second_hit,
        tolerances=tol,
    )


def _gen_params(args) -> GenParams:
    base = dict(_FAMILIES[args.family])
    fixed = args.fixed_null_count
    if fixed is None:
        fixed = args.n // 5 if args.family == "huge" else 0
    if args.eig_a is not None:
        base["eig_range_A"] = tuple(args.eig_a)
    if args.eig_c is not None:
        base["eig_range_C"] = tuple(args.eig_c)
    return GenParams(
        n=args.n,
        k=args.k,
        seed=args.seed,
        shared_null_count=args.shared_null_count,
        insert_prob=args.insert_prob,
        fixed_null_count=fixed,
        **base,
    )


def _require_file(path: str):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")


def _cmd_generate(args) -> int:
    inst = generate_instance(_gen_params(args))
    fileio.save_instance(inst, args.output)
    print(f"wrote instance n={inst.n} k={inst.k} to {args.output}")
    return 0


def _cmd_solve(args) -> int:
    _require_file(args.input)
    config = RunConfig(
        command="solve",
        input_path=args.input,
        out_dir=args.out_dir,
        log_format=args.log_format,
        method=args.method,
        solver_overrides={
            "alpha": args.alpha,
            "gap_tol": args.gap_tol,
            "box_bound": args.box_bound,
            "max_iters": args.max_iters,
            "time_limit": args.time_limit,
            "second_hit": not args.no_second_hit,
            "t1_list": args.t1,
        },
    )
    inst = fileio.load_instance(args.input)
    params = _solver_params(args)
    solver = pcp_solve if args.method == "pcp" else standard_cp_solve
    result = solver(inst, params)
    stem = os.path.splitext(os.path.basename(args.input))[0]
    if stem.endswith(".dat"):
        stem = stem[: -len(".dat")]
    paths = emit_report(result, config, stem=f"{stem}_{args.method}")
    print(f"status: {result.status}")
    print(f"lb: {result.lb:.10g}")
    print(f"ub: {result.ub:.10g}")
    print(f"gap: {result.gap:.3e}")
    print(f"reports: {paths['trace']} {paths['summary']}")
    return 0 if result.status == "converged" else 2


def _cmd_project(args) -> int:
    _require_file(args.input)
    X, D = fileio.load_matrix_pair(args.input)
    tol = ProjectionTolerances(t1_list=tuple(args.t1)) if args.t1 else ProjectionTolerances()
    out = project_psd(X, D, tol)
    t = out.t_star
    print(f"case: {out.case_label}")
    print(f"t_star: {'inf' if math.isinf(t) else '%.17g' % t}")
    print(f"hit_vectors: {len(out.hit_vectors)}")
    for v in out.hit_vectors:
        print("  " + " ".join("%.17g" % x for x in v))
    return 0


def _cmd_verify(args) -> int:
    _require_file(args.instance)
    _require_file(args.point)
    inst = fileio.load_instance(args.instance)
    with open(args.point) as fh:
        data = json.load(fh)
    y = np.array(data["y"] if isinstance(data, dict) else data, dtype=float)
    ok, lam = verify_interior(inst, y, args.eps)
    print(f"feasible: {ok}")
    print(f"lambda_min: {lam:.10e}")
    print(f"objective: {float(inst.b @ y):.17g}")
    return 0 if ok else 1


def _bench_one(task) -> dict:
    n, k, seed, family, method, out_dir, log_format = task
    gen_kwargs = dict(_FAMILIES[family])
    if family == "huge":
        gen_kwargs["fixed_null_count"] = n // 5
    inst = generate_instance(GenParams(n=n, k=k, seed=seed, **gen_kwargs))
    solver = pcp_solve if method == "pcp" else standard_cp_solve
    result = solver(inst, SolverParams())
    stem = f"{family}_n{n}_k{k}_s{seed}_{method}"
    run_dir = os.path.join(out_dir, stem)
    emit_report(result, RunConfig(command="bench", out_dir=run_dir, log_format=log_format), stem=stem)
    summary = summary_dict(result)
    summary.update({"n": n, "k": k, "seed": seed, "method": method})
    return summary


def _cmd_bench(args) -> int:
    tasks = [
        (n, k, seed, args.family, args.method, args.out_dir, args.log_format)
        for n in args.n
        for k in args.k
        for seed in args.seeds
    ]
    os.makedirs(args.out_dir, exist_ok=True)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            summaries = list(pool.map(_bench_one, tasks))
    else:
        summaries = [_bench_one(t) for t in tasks]
    table = os.path.join(args.out_dir, "bench_summary.jsonl")
    with open(table, "w") as fh:
        for s in summaries:
            fh.write(json.dumps(s, sort_keys=True) + "\n")
    worst = max((s["gap"] for s in summaries), default=0.0)
    print(f"ran {len(summaries)} instances; worst gap {worst:.3e}")
    print(f"summaries: {table}")
    return 0 if all(s["status"] == "converged" for s in summaries) else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="projsdp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--family", choices=sorted(_FAMILIES), default="first")
    g.add_argument("--shared-null-count", type=int, default=None)
    g.add_argument("--fixed-null-count", type=int, default=None)
    g.add_argument("--insert-prob", type=float, default=0.8)
    g.add_argument("--eig-a", type=float, nargs=2, default=None)
    g.add_argument("--eig-c", type=float, nargs=2, default=None)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("input")
    s.add_argument("--method", choices=("pcp", "cp"), default="pcp")
    s.add_argument("--out-dir", default="runs")
    s.add_argument("--log-format", choices=("csv", "jsonl"), default="csv")
    _add_solver_flags(s)
    s.set_defaults(func=_cmd_solve)

    pr = sub.add_parser("project", help="one-shot projection on a matrix pair")
    pr.add_argument("input")
    pr.add_argument("--t1", type=float, nargs="+", default=None)
    pr.set_defaults(func=_cmd_project)

    v = sub.add_parser("verify", help="check a claimed point")
    v.add_argument("instance")
    v.add_argument("point")
    v.add_argument("--eps", type=float, default=1e-7)
    v.set_defaults(func=_cmd_verify)

    bn = sub.add_parser("bench", help="seeds x sizes benchmark matrix")
    bn.add_argument("--n", type=int, nargs="+", required=True)
    bn.add_argument("--k", type=int, nargs="+", required=True)
    bn.add_argument("--seeds", type=int, nargs="+", required=True)
    bn.add_argument("--family", choices=sorted(_FAMILIES), default="first")
    bn.add_argument("--method", choices=("pcp", "cp"), default="pcp")
    bn.add_argument("--out-dir", default="bench")
    bn.add_argument("--log-format", choices=("csv", "jsonl"), default="csv")
    bn.add_argument("--jobs", type=int, default=max(os.cpu_count() or 1, 1))
    bn.set_defaults(func=_cmd_bench)
    return ap


def _limit_blas_threads():
    """Desk-scale dense work: thread spin-wait costs more than it saves."""
    limit = os.environ.get("PROJSDP_BLAS_THREADS", "1")
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(int(limit))
    except (ImportError, ValueError):
        pass


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _limit_blas_threads()
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # CLI boundary: report, do not trace-dump
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
