"""Solver drivers: the projective main loop and the classic separation loop.

The projective loop keeps an interior point y_in and, at each iteration,
shoots a ray from y_in toward the optimum of the outer LP.  The projection
oracle returns the maximal feasible step and the first-hit cut; the pierce
point certifies a lower bound, the cut tightens the outer LP (upper bound),
and the interior point advances a conservative fraction alpha of the step.
While the outer optimum still touches the artificial variable box the loop
runs in bootstrap mode: plain separation of the outer point, which is also
what standard_cp_solve does for its entire run.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadInput,
    CaseDUnresolved,
    InfeasibleStart,
    LinalgError,
    MasterInfeasible,
    NumericalStall,
)
from .linalg import max_abs, min_eigenpairs
from .master import MasterSolution, OuterApprox, add_cut, box_active, solve_master
from .model import (
    DualCertificate,
    SdpInstance,
    assemble_direction,
    assemble_slack,
    build_dual_certificate,
    cut_from_vector,
    linear_ratio_test,
    verify_interior,
)
from .projection import ProjectionTolerances, project_psd


@dataclass(frozen=True)
class SolverParams:
    alpha: float = 0.3
    gap_tol: float = 1e-5
    box_bound: float = 1e5
    max_iters: int = 10000
    second_hit: bool = True
    tolerances: ProjectionTolerances = field(default_factory=ProjectionTolerances)
    time_limit: float | None = None
    eps_feasible: float = 1e-7
    y_start: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.gap_tol <= 0:
            raise ValueError("gap_tol must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    lb: float
    ub: float
    gap: float
    t_star: float  # nan on pure separation iterations
    case_label: str
    mode: str  # "bootstrap" | "projective"
    timings: dict[str, float]
    cuts_total: int
    wall_clock: float


@dataclass(frozen=True)
class SolveResult:
    status: str  # "converged" | "iter_limit" | "time_limit" | "failed"
    y_best: np.ndarray
    lb: float
    ub: float
    certificate: DualCertificate | None
    trace: list[IterationRecord]
    message: str = ""

    @property
    def gap(self) -> float:
        return self.ub - self.lb


def _separation_cuts(inst, slack_eigs, thresh, want_second):
    cuts = []
    if slack_eigs[0].value < thresh:
        cuts.append(cut_from_vector(inst, slack_eigs[0].vector))
        if want_second and len(slack_eigs) > 1 and slack_eigs[1].value < thresh:
            cuts.append(cut_from_vector(inst, slack_eigs[1].vector))
    return cuts


class _Run:
    """Bookkeeping shared by both drivers."""

    def __init__(self, inst: SdpInstance, params: SolverParams):
        self.inst = inst
        self.params = params
        self.approx = OuterApprox(
            k=inst.k,
            box_bound=params.box_bound,
            linear_constraints=inst.all_linear_constraints(),
        )
        self.lb = -math.inf
        self.ub = math.inf
        self.y_best: np.ndarray | None = None
        self.trace: list[IterationRecord] = []
        self.t0 = time.perf_counter()
        self.sep_thresh = -params.eps_feasible * max(1.0, max_abs(inst.C))
        self.last_sol: MasterSolution | None = None
        self.last_cuts: list = []
        self.dup_streak = 0

    def store_solution(self, sol: MasterSolution):
        # snapshot the rows the LP actually saw so the certificate stays
        # aligned with its multipliers whatever happens to the cut list later
        self.last_sol = sol
        self.last_cuts = list(self.approx.cuts)

    def wall(self) -> float:
        return time.perf_counter() - self.t0

    def update_lb(self, value: float, point: np.ndarray):
        value = min(value, self.ub)  # keep the sandwich exact under roundoff
        if value > self.lb:
            self.lb = value
            self.y_best = point.copy()

    def record(self, it, t_star, case, mode, timings, done: str | None):
        gap = self.ub - self.lb
        self.trace.append(
            IterationRecord(
                iter=it,
                lb=self.lb,
                ub=self.ub,
                gap=gap,
                t_star=t_star,
                case_label=case,
                mode=mode,
                timings=timings,
                cuts_total=len(self.approx.cuts),
                wall_clock=self.wall(),
            )
        )
        return done

    def add_cuts(self, cuts) -> tuple[int, int]:
        accepted = sum(1 for c in cuts if add_cut(self.approx, c))
        return len(cuts), accepted

    def stagnated(self, proposed: int, accepted: int) -> bool:
        if proposed > 0 and accepted == 0:
            self.dup_streak += 1
        elif proposed > 0:
            self.dup_streak = 0
        return self.dup_streak >= 2

    def limits(self, it) -> str | None:
        if self.ub - self.lb <= self.params.gap_tol * max(1.0, abs(self.ub)):
            return "converged"
        if it >= self.params.max_iters:
            return "iter_limit"
        if self.params.time_limit is not None and self.wall() > self.params.time_limit:
            return "time_limit"
        return None

    def finish(self, status: str, message: str = "") -> SolveResult:
        cert = None
        if self.last_sol is not None and self.last_sol.status == "optimal":
            cert = build_dual_certificate(
                self.inst, self.last_cuts, self.last_sol.cut_multipliers
            )
        y = self.y_best
        if y is None:
            y = self.last_sol.y_out if self.last_sol is not None else np.zeros(self.inst.k)
        return SolveResult(
            status=status,
            y_best=y,
            lb=self.lb,
            ub=self.ub,
            certificate=cert,
            trace=self.trace,
            message=message,
        )


def pcp_solve(inst: SdpInstance, params: SolverParams | None = None) -> SolveResult:
    """Projective main loop; requires a feasible start (y = 0 by default).

    Raises InfeasibleStart when the starting point fails the interior
    check.  Returns a certified trajectory: lb always comes from a
    verified feasible point, ub from the outer LP over valid cuts.
    """
    params = params or SolverParams()
    b = inst.b
    y_in = (
        np.zeros(inst.k)
        if params.y_start is None
        else np.asarray(params.y_start, dtype=float).copy()
    )
    ok, lam0 = verify_interior(inst, y_in, params.eps_feasible)
    if not ok:
        raise InfeasibleStart(
            f"starting point infeasible (slack eigenvalue {lam0:.3e})"
        )
    run = _Run(inst, params)
    run.update_lb(float(b @ y_in), y_in)

    status = "iter_limit"
    message = ""
    for it in range(1, params.max_iters + 1):
        timings = {"assemble": 0.0, "projection": 0.0, "master_lp": 0.0}
        t = time.perf_counter()
        try:
            sol = solve_master(run.approx, b)
        except (MasterInfeasible, NumericalStall) as exc:
            status, message = "failed", f"master LP: {exc}"
            run.record(it, math.nan, "", "projective", timings, None)
            break
        timings["master_lp"] = time.perf_counter() - t
        run.store_solution(sol)
        y_out = sol.y_out
        run.ub = min(run.ub, sol.objective)
        mode = "bootstrap" if box_active(sol) else "projective"
        t_rec = math.nan
        case = ""
        proposed = accepted = 0
        done: str | None = None

        separate_outer = mode == "bootstrap"
        if mode == "projective":
            t = time.perf_counter()
            d = y_out - y_in
            X = assemble_slack(inst, y_in)
            D = assemble_direction(inst, y_in, y_out)
            timings["assemble"] += time.perf_counter() - t
            t_lin = linear_ratio_test(inst, y_in, d)
            t = time.perf_counter()
            try:
                out = project_psd(
                    X, D, params.tolerances, second_hit=params.second_hit
                )
            except (CaseDUnresolved, BadInput, LinalgError) as exc:
                out = None
                case = "fallback"
                message = str(exc)
            timings["projection"] += time.perf_counter() - t
            if out is not None and out.case_label == "D-tricky":
                out = None  # no usable witness: separate the outer point instead
                case = "D-tricky"
                t_rec = 0.0
            if out is not None:
                case = out.case_label
                t_exit = min(out.t_star, t_lin)
                t_rec = t_exit
                t_move = min(t_exit, 1.0)
                if t_move >= 1.0:
                    okf, _ = verify_interior(inst, y_out, params.eps_feasible)
                    if okf:
                        run.update_lb(float(b @ y_out), y_out)
                        done = "converged"
                    else:
                        separate_outer = True  # oracle and checker disagree; cut instead
                else:
                    if out.t_star <= t_lin and out.hit_vectors:
                        t = time.perf_counter()
                        cuts = [cut_from_vector(inst, v) for v in out.hit_vectors]
                        timings["assemble"] += time.perf_counter() - t
                        proposed, accepted = run.add_cuts(cuts)
                    if t_move > 0.0:
                        pierce = y_in + t_move * d
                        okp, _ = verify_interior(inst, pierce, params.eps_feasible)
                        if okp:
                            run.update_lb(float(b @ pierce), pierce)
                        y_in = y_in + params.alpha * t_move * d
                    if accepted == 0 and t_move <= 0.0:
                        # neither a cut nor a move: the master would repeat
                        # itself, so force progress on the outer point
                        separate_outer = True
            else:
                separate_outer = True

        if separate_outer and done is None:
            t = time.perf_counter()
            X_out = assemble_slack(inst, y_out)
            timings["assemble"] += time.perf_counter() - t
            t = time.perf_counter()
            eigs = min_eigenpairs(X_out, min(2, inst.n))
            cuts = _separation_cuts(inst, eigs, run.sep_thresh, params.second_hit)
            timings["projection"] += time.perf_counter() - t
            if not cuts:
                # the outer optimum is feasible: bounds meet
                run.update_lb(float(b @ y_out), y_out)
                done = "converged"
            else:
                t = time.perf_counter()
                proposed, accepted = run.add_cuts(cuts)
                timings["assemble"] += time.perf_counter() - t

        run.record(it, t_rec, case, mode, timings, None)
        if done is not None:
            status = done
            break
        if run.stagnated(proposed, accepted):
            status, message = "failed", "stagnation: duplicate cuts twice in a row"
            break
        limit = run.limits(it)
        if limit is not None:
            status = limit
            break

    return run.finish(status, message)


def standard_cp_solve(inst: SdpInstance, params: SolverParams | None = None) -> SolveResult:
    """Classic separation loop: optimize the outer LP, cut the optimum,
    repeat until the outer optimum is feasible.  No interior trajectory,
    so the lower bound only appears at convergence."""
    params = params or SolverParams()
    b = inst.b
    run = _Run(inst, params)
    status = "iter_limit"
    message = ""
    for it in range(1, params.max_iters + 1):
        timings = {"assemble": 0.0, "projection": 0.0, "master_lp": 0.0}
        t = time.perf_counter()
        try:
            sol = solve_master(run.approx, b)
        except (MasterInfeasible, NumericalStall) as exc:
            status, message = "failed", f"master LP: {exc}"
            run.record(it, math.nan, "", "bootstrap", timings, None)
            break
        timings["master_lp"] = time.perf_counter() - t
        run.store_solution(sol)
        y_out = sol.y_out
        run.ub = min(run.ub, sol.objective)
        t = time.perf_counter()
        X_out = assemble_slack(inst, y_out)
        timings["assemble"] = time.perf_counter() - t
        t = time.perf_counter()
        eigs = min_eigenpairs(X_out, min(2, inst.n))
        cuts = _separation_cuts(inst, eigs, run.sep_thresh, params.second_hit)
        timings["projection"] = time.perf_counter() - t
        if not cuts:
            run.update_lb(float(b @ y_out), y_out)
            run.record(it, math.nan, "", "bootstrap", timings, None)
            status = "converged"
            break
        proposed, accepted = run.add_cuts(cuts)
        run.record(it, math.nan, "", "bootstrap", timings, None)
        if run.stagnated(proposed, accepted):
            status, message = "failed", "stagnation: duplicate cuts twice in a row"
            break
        if it >= params.max_iters:
            status = "iter_limit"
            break
        if params.time_limit is not None and run.wall() > params.time_limit:
            status = "time_limit"
            break

    return run.finish(status, message)
