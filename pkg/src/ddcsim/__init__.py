"""Distributed difference-of-convex optimization over directed graphs."""

from .consensus import (
    ConsensusResult,
    ConsensusState,
    DimensionMismatch,
    MaxRoundsExceeded,
    consensus_round,
    mixing_round,
    radius_recursion,
    radius_update,
    run_eta_consensus,
)
from .dc import (
    DcFunction,
    InnerSolverDiverged,
    L1Norm,
    L2Norm,
    LeastSquaresL1,
    ProxOracle,
    ScaledQuadratic,
    SmoothingOutOfRange,
    SmoothingParams,
    Zero,
    envelope_gradient,
    lipschitz_constants,
    moreau_value,
    prox,
    smoothed_gradient,
)
from .graph import (
    Digraph,
    NotStronglyConnected,
    RetriesExhausted,
    WeightMatrix,
    column_stochastic_weights,
    diameter,
    erdos_renyi,
    strongly_connected,
)
from .harness import (
    ExperimentConfig,
    Instance,
    dc_problem,
    generate_instance,
    read_instance,
    run_experiment,
    sweep,
    write_instance,
)
from .metrics import (
    CSV_COLUMNS,
    RunRecord,
    objective_value,
    prox_pairs,
    residuals,
    stationarity_certificate,
)
from .solver import (
    RunResult,
    SolverConfig,
    SolverState,
    gaussian_init,
    gradient_step,
    outer_iteration,
    parse_variant,
    run,
    zeros_init,
)

__version__ = "0.1.0"
