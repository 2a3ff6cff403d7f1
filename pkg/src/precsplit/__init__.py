"""precsplit: degenerate preconditioned proximal point splitting.

Splitting methods (Douglas-Rachford, Chambolle-Pock, Ryu, Malitsky-Tam)
expressed as relaxed fixed-point iterations driven by a preconditioner
M = C C^T, with a reduced iteration on the range of C^T, closed-form
fixed-point sets and limits for subspace data, spectral analysis of the
two-lines model problem, square-root factorizations of the saddle
metric, and a small tomography experiment.
"""

from ._accel import HAS_NUMBA
from .analysis import (
    FactorizationResult,
    TwoLinesReport,
    factor_cholesky,
    factor_scalar,
    factor_sqrt,
    metric_matrix,
    sqrt_M_polar,
    sqrt_M_sym,
    trig_form_check,
    two_lines_T,
    two_lines_norm,
    two_lines_report,
)
from .core import (
    IterationTrace,
    LambdaSchedule,
    LockstepTrace,
    PPPInstance,
    check_intertwining,
    linear_matrix,
    run_lockstep,
    run_ppp,
    run_rppp,
)
from .errors import ConfigError, InfeasibleError, NumericalError
from .experiments import (
    ExperimentReport,
    PhantomProblem,
    convergence_study,
    make_phantom,
    run_phantom,
)
from .limits import (
    AffineSet,
    FixSets,
    LimitPrediction,
    cp_affine_limits,
    cp_fix_and_limits,
    dr_fix_and_limits,
    m_projection_oracle,
    mt_fix_and_projection,
    pi_S_M,
    predict_limits,
    ryu_fix_and_projection,
)
from .linalg import (
    Subspace,
    cholesky,
    nullspace,
    operator_norm,
    orthonormal_basis,
    preimage,
    principal_sqrt,
    pseudo_inverse,
    spectral_radius,
)
from .methods import build_cp, build_dr, build_mt, build_ryu
from .operators import (
    LinearMonotone,
    NormalConeAffine,
    NormalConePoint,
    NormalConeSubspace,
    ResolventOp,
    ZeroOp,
    count_resolvent_calls,
    inverse_resolvent,
    scaled,
)

__version__ = "0.1.0"

__all__ = [
    "AffineSet",
    "ConfigError",
    "ExperimentReport",
    "FactorizationResult",
    "FixSets",
    "HAS_NUMBA",
    "InfeasibleError",
    "IterationTrace",
    "LambdaSchedule",
    "LimitPrediction",
    "LinearMonotone",
    "LockstepTrace",
    "NormalConeAffine",
    "NormalConePoint",
    "NormalConeSubspace",
    "NumericalError",
    "PPPInstance",
    "PhantomProblem",
    "ResolventOp",
    "Subspace",
    "TwoLinesReport",
    "ZeroOp",
    "build_cp",
    "build_dr",
    "build_mt",
    "build_ryu",
    "check_intertwining",
    "cholesky",
    "convergence_study",
    "count_resolvent_calls",
    "cp_affine_limits",
    "cp_fix_and_limits",
    "dr_fix_and_limits",
    "factor_cholesky",
    "factor_scalar",
    "factor_sqrt",
    "inverse_resolvent",
    "linear_matrix",
    "m_projection_oracle",
    "make_phantom",
    "metric_matrix",
    "mt_fix_and_projection",
    "nullspace",
    "operator_norm",
    "orthonormal_basis",
    "pi_S_M",
    "predict_limits",
    "preimage",
    "principal_sqrt",
    "pseudo_inverse",
    "run_lockstep",
    "run_phantom",
    "run_ppp",
    "run_rppp",
    "ryu_fix_and_projection",
    "scaled",
    "spectral_radius",
    "sqrt_M_polar",
    "sqrt_M_sym",
    "trig_form_check",
    "two_lines_T",
    "two_lines_norm",
    "two_lines_report",
]
