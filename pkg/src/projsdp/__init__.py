"""Dense semidefinite programming by projection-based cutting planes.

Solves max b.T y subject to sum_i y_i A_i <= C (matrix inequality) plus
optional linear rows, by repeatedly projecting an interior point toward
the outer-LP optimum with an exact PSD-cone projection oracle.
"""

from .driver import IterationRecord, SolverParams, SolveResult, pcp_solve, standard_cp_solve
from .fileio import (
    load_instance,
    load_matrix_pair,
    parse_sdpa,
    save_instance,
    save_matrix_pair,
    write_sdpa,
)
from .instances import GenParams, generate_instance, random_orthonormal_completion
from .linalg import (
    EigenPair,
    LdlCoreFactor,
    QrActiveFactor,
    congruent_solve,
    ldl_core_factor,
    min_eigenpairs,
    min_norm_solve,
    qr_active_factor,
    symmetrize,
)
from .master import MasterSolution, OuterApprox, add_cut, box_active, solve_master
from .model import (
    DualCertificate,
    LinearCut,
    SdpInstance,
    assemble_direction,
    assemble_slack,
    build_dual_certificate,
    cut_from_vector,
    linear_ratio_test,
    verify_interior,
)
from .projection import (
    ProjectionOutcome,
    ProjectionTolerances,
    bisection_reference,
    project_case_d,
    project_psd,
)
from .report import RunConfig, emit_report

__version__ = "0.1.0"

__all__ = [
    "EigenPair",
    "DualCertificate",
    "GenParams",
    "IterationRecord",
    "LdlCoreFactor",
    "LinearCut",
    "MasterSolution",
    "OuterApprox",
    "ProjectionOutcome",
    "ProjectionTolerances",
    "QrActiveFactor",
    "RunConfig",
    "SdpInstance",
    "SolveResult",
    "SolverParams",
    "add_cut",
    "assemble_direction",
    "assemble_slack",
    "bisection_reference",
    "box_active",
    "build_dual_certificate",
    "congruent_solve",
    "cut_from_vector",
    "emit_report",
    "generate_instance",
    "ldl_core_factor",
    "linear_ratio_test",
    "load_instance",
    "load_matrix_pair",
    "min_eigenpairs",
    "min_norm_solve",
    "parse_sdpa",
    "pcp_solve",
    "project_case_d",
    "project_psd",
    "qr_active_factor",
    "random_orthonormal_completion",
    "save_instance",
    "save_matrix_pair",
    "solve_master",
    "standard_cp_solve",
    "symmetrize",
    "verify_interior",
    "write_sdpa",
]
