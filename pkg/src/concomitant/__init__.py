"""Sparse multi-task linear regression under heteroscedastic noise, jointly
estimating the coefficients and the noise square-root covariance, with
duality-gap-certified solvers and synthetic benchmark protocols."""

from .math_ops import (
    RankOneNoise,
    block_soft_threshold,
    l21_norm,
    mahalanobis_sq,
    row_norm_2inf,
    row_norms,
    sigma_update_block,
    sigma_update_full,
    sigma_update_rank_one,
    soft_threshold,
    spectral_norm,
)
from .sbhcl import (
    SbhclState,
    bcd_step_sbhcl,
    default_lambda_grid,
    dual_point_sbhcl,
    dual_sbhcl,
    fit_mtl,
    fit_path,
    fit_sbhcl,
    fit_scl,
    lambda_max_mtl,
    lambda_max_sbhcl,
    make_sbhcl_state,
    primal_sbhcl,
)
from .sgcl import (
    SgclState,
    bcd_epoch_sgcl,
    dual_point_sgcl,
    dual_sgcl,
    fit_sgcl,
    fit_sgcl_single_task,
    lambda_max_sgcl,
    make_sgcl_state,
    primal_sgcl,
)
from .simulate import (
    Dataset,
    RmseReport,
    RocPoint,
    SimulationSpec,
    TrialsReport,
    gen_coeffs,
    gen_dataset,
    gen_design,
    metric_normalized_rmse,
    roc_sweep,
    staircase_auc,
    trials_experiment,
)
from .types import (
    BlockNoise,
    CalibrationFailure,
    Coefficients,
    DegenerateProblem,
    DesignMatrix,
    DualPoint,
    EigenFailure,
    FitResult,
    FullNoise,
    IdentityNoise,
    NonFinite,
    OracleZeroResidual,
    ShapeMismatch,
    SigmaFloor,
    SolverConfig,
    TaskMatrix,
    ZeroBlock,
    default_sigma_floor,
    identity_noise,
    validate_dataset,
)

__version__ = "0.1.0"
