"""Recursive least squares with constant regularization.

Estimator updates that stay exactly equivalent to the regularized batch
solution, excitation and conditioning diagnostics, closed-form bias
predictions, FIR/IIR regression models, and deterministic experiment runs.
"""

from ._version import __version__
from .diagnostics import (
    BiasPrediction,
    TraceRecord,
    average_over_trials,
    exact_bias,
    log_slope,
    log_slope_sequence,
    moving_average,
    predict_bias_asymptote,
)
from .errors import (
    ConfigError,
    EigenConvergenceError,
    NotPersistentlyExcitingError,
    NotPSDError,
    NotSPDError,
    NotSymmetricError,
    RankDeficientError,
    RlsBiasError,
    SimulationDivergenceError,
)
from .estimators import (
    EstimatorState,
    Observation,
    Regularizer,
    RegressorAccumulator,
    bls_solve,
    bls_solve_unregularized,
    error_identity_check,
    pinv_identity_check,
    rls_init,
    rls_step,
)
from .excitation import (
    CEstimate,
    PEWindowReport,
    estimate_C,
    pe_window_check,
    regularized_condition_trajectory,
)
from .experiments import (
    DEFAULT_R_GRID,
    DEFAULT_SEED,
    InputSpec,
    RunManifest,
    RunResult,
    ScenarioConfig,
    TrialSummary,
    emit_csv,
    generate_regressor_stream,
    make_config,
    run_r_grid,
    run_scenario,
    standard_normal,
    trial_generator,
)
from .linalg import (
    condition_number,
    kron_with_identity,
    spd_cholesky,
    spd_inverse,
    spd_solve,
    sym_eigenvalues,
    symmetrize,
    vec_stack,
)
from .sysid import (
    FirModel,
    IirModel,
    SignalBuffer,
    fir_regressor,
    fir_simulate,
    fir_true_theta,
    iir_regressor,
    iir_simulate,
    iir_true_theta,
)

__all__ = [name for name in dir() if not name.startswith("_")]
