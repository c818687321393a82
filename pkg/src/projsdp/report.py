"""Run reports: per-iteration trace files and a JSON summary.

Output is byte-stable for identical results: all numbers are printed with
17 significant digits and nothing time- or host-dependent is included
beyond the wall-clock columns stored in the result itself.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .driver import SolveResult
from .errors import IoError

_CSV_COLUMNS = [
    "iter",
    "wall_seconds",
    "lb",
    "ub",
    "gap",
    "t_star",
    "case_label",
    "mode",
    "cuts_total",
    "assemble_seconds",
    "projection_seconds",
    "master_lp_seconds",
]


@dataclass
class RunConfig:
    """Parsed command-line request; validated before any work starts."""

    command: str
    input_path: str | None = None
    output_path: str | None = None
    out_dir: str | None = None
    log_format: str = "csv"  # "csv" | "jsonl"
    method: str = "pcp"  # "pcp" | "cp"
    solver_overrides: dict = field(default_factory=dict)
    gen_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.log_format not in ("csv", "jsonl"):
            raise ValueError(f"unknown log format {self.log_format!r}")
        if self.method not in ("pcp", "cp"):
            raise ValueError(f"unknown method {self.method!r}")


def _num(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _record_fields(rec) -> list[str]:
    return [
        str(rec.iter),
        _num(rec.wall_clock),
        _num(rec.lb),
        _num(rec.ub),
        _num(rec.gap),
        _num(rec.t_star),
        rec.case_label,
        rec.mode,
        str(rec.cuts_total),
        _num(rec.timings.get("assemble", 0.0)),
        _num(rec.timings.get("projection", 0.0)),
        _num(rec.timings.get("master_lp", 0.0)),
    ]


def summary_dict(result: SolveResult) -> dict:
    out = {
        "status": result.status,
        "lb": result.lb,
        "ub": result.ub,
        "gap": result.gap,
        "iterations": len(result.trace),
        "cuts_total": result.trace[-1].cuts_total if result.trace else 0,
        "y_best": [float(v) for v in result.y_best],
        "message": result.message,
    }
    if result.certificate is not None:
        cert = result.certificate
        out["certificate"] = {
            "objective": cert.objective,
            "lambda_min": cert.lambda_min,
            "stationarity_residual": cert.stationarity_residual,
            "ub_match": abs(cert.objective - result.ub),
        }
    return out


def emit_report(result: SolveResult, config: RunConfig, stem: str = "run") -> dict:
    """Write the per-iteration trace and the JSON summary under
    config.out_dir; returns {kind: path} for the files written."""
    out_dir = config.out_dir or "."
    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = {}
        if config.log_format == "csv":
            trace_path = os.path.join(out_dir, f"{stem}_trace.csv")
            with open(trace_path, "w") as fh:
                fh.write(",".join(_CSV_COLUMNS) + "\n")
                for rec in result.trace:
                    fh.write(",".join(_record_fields(rec)) + "\n")
        else:
            trace_path = os.path.join(out_dir, f"{stem}_trace.jsonl")
            with open(trace_path, "w") as fh:
                for rec in result.trace:
                    fh.write(
                        json.dumps(dict(zip(_CSV_COLUMNS, _record_fields(rec))))
                        + "\n"
                    )
        paths["trace"] = trace_path
        summary_path = os.path.join(out_dir, f"{stem}_summary.json")
        with open(summary_path, "w") as fh:
            json.dump(summary_dict(result), fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths["summary"] = summary_path
        return paths
    except OSError as exc:
        raise IoError(f"could not write report under {out_dir}: {exc}") from exc
