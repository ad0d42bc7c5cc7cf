"""Sampling from logconcave distributions truncated on open polytopes.

The sampler is a Metropolis chain whose Gaussian proposal covariance is the
inverse of a position-dependent local metric, either a log-barrier Hessian
plus a Euclidean regularizer ("soft-threshold") or a Lewis-weighted barrier
Hessian plus the same regularizer. Supporting modules provide Gaussian
affine preconditioning, warm-start construction, iteration-budget planning,
and a diagnostics suite (rejection-sampling oracles, cross-ratio / Hilbert
geometry, numeric self-concordance certification).
"""

from dikinwalk.polytope import (
    Chord,
    Polytope,
    PolytopeError,
    Slack,
    chord,
    contains,
    make_box,
    make_orthant,
    make_simplex,
    parse_polytope,
    serialize_polytope,
    slack,
)
from dikinwalk.target import (
    AffineTransform,
    GaussianTarget,
    LogConcaveTarget,
    map_samples,
    precondition_gaussian,
    quadratic_target,
)
from dikinwalk.metrics import (
    LewisWeights,
    MetricError,
    MetricEval,
    RegularizedLewis,
    SoftThreshold,
    default_lewis_q,
    dikin_ellipsoid_contains,
    evaluate_metric,
    lewis_weights,
    local_norm,
    regularized_lewis_metric,
    soft_threshold_metric,
)
from dikinwalk.walk import (
    ChainState,
    SampleBatch,
    StepStats,
    WalkConfig,
    adapt_step_size,
    log_accept_ratio,
    propose,
    run,
    step,
    write_csv,
)
from dikinwalk.planner import (
    BudgetResult,
    MixingBudgetQuery,
    ModePair,
    WarmStartBall,
    beyond_worst_case_budget,
    mixing_budget,
    radius_hat,
    sample_warm_start,
    solve_modes,
    violated_constraint_count,
    warm_start_ball,
)
from dikinwalk.diagnostics import (
    CertReport,
    MetricPairReport,
    MomentReport,
    OracleSamples,
    certify_ssc,
    certify_symmetry,
    compare_moments,
    cross_ratio,
    hilbert,
    mixed_distance,
    rejection_oracle,
)

__version__ = "0.1.0"
