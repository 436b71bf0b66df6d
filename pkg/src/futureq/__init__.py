"""futureq: non-Hermitian Hamiltonian mechanics with a future boundary state.

Builds the metric that makes a diagonalizable Hamiltonian normal,
selects boundary states by maximizing the transition amplitude, tracks
how generic states collapse onto the top-imaginary eigenspace, and runs
the classical phase-space analog where trajectories are scored by the
time integral of Im H and linger at potential saddles.
"""

from .classical import (
    BLOWUP_BOUND,
    ComplexHamiltonianSpec,
    CriticalPoint,
    DwellResult,
    GaussianBump,
    InflatonReport,
    OptResult,
    PhaseState,
    RewardReport,
    SearchConfig,
    Trajectory,
    double_well_spec,
    dwell_time,
    hilltop_bump,
    inflaton_toy,
    integrate,
    optimize_initial,
    reward,
    reward_of_starts,
    saddle_points,
)
from .emergence import (
    SurvivalSeries,
    decay_rate_fit,
    generic_state,
    hermiticity_defect,
    survival_fractions,
)
from .errors import (
    Blowup,
    Defective,
    DimMismatch,
    FutureqError,
    IllConditioned,
    InsufficientData,
    NearOrthogonal,
    NoConvergence,
    NoImprovement,
    NumericalError,
    PropagatorOverflow,
    ScenarioParseError,
    ScenarioValidationError,
    ZeroNorm,
)
from .evolution import (
    EvolvingPair,
    evolve_a,
    evolve_b,
    ordinary_average,
    q_matrix_element,
    weak_value,
    weak_value_propagated,
)
from .hamiltonians import random_diagonalizable, standard_2x2
from .linalg import (
    SpectralDecomposition,
    as_cmatrix,
    as_state,
    commutator_norm,
    eig_decompose,
    mat_exp_prop,
)
from .maximize import (
    MaximizerResult,
    RealityReport,
    analytic_maximize,
    effective_generator_check,
    numeric_maximize,
    observable_seeds,
    verify_reality,
)
from .qmetric import (
    QMetric,
    build_q,
    identity_metric,
    is_q_hermitian,
    q_adjoint,
    q_angle,
    q_inner,
    q_norm,
    q_normalize,
    random_q_hermitian,
)
from .scenario import (
    ResultBundle,
    Scenario,
    parse_scenario,
    replace_seed,
    run_scenario,
    serialize_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "BLOWUP_BOUND",
    "Blowup",
    "ComplexHamiltonianSpec",
    "CriticalPoint",
    "Defective",
    "DimMismatch",
    "DwellResult",
    "EvolvingPair",
    "FutureqError",
    "GaussianBump",
    "IllConditioned",
    "InflatonReport",
    "InsufficientData",
    "MaximizerResult",
    "NearOrthogonal",
    "NoConvergence",
    "NoImprovement",
    "NumericalError",
    "OptResult",
    "PhaseState",
    "PropagatorOverflow",
    "QMetric",
    "RealityReport",
    "ResultBundle",
    "RewardReport",
    "Scenario",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SearchConfig",
    "SpectralDecomposition",
    "SurvivalSeries",
    "Trajectory",
    "ZeroNorm",
    "analytic_maximize",
    "as_cmatrix",
    "as_state",
    "build_q",
    "commutator_norm",
    "decay_rate_fit",
    "double_well_spec",
    "dwell_time",
    "effective_generator_check",
    "eig_decompose",
    "evolve_a",
    "evolve_b",
    "generic_state",
    "hermiticity_defect",
    "hilltop_bump",
    "identity_metric",
    "inflaton_toy",
    "integrate",
    "is_q_hermitian",
    "mat_exp_prop",
    "numeric_maximize",
    "observable_seeds",
    "optimize_initial",
    "ordinary_average",
    "parse_scenario",
    "q_adjoint",
    "q_angle",
    "q_inner",
    "q_matrix_element",
    "q_norm",
    "q_normalize",
    "random_diagonalizable",
    "replace_seed",
    "random_q_hermitian",
    "reward",
    "reward_of_starts",
    "run_scenario",
    "saddle_points",
    "serialize_scenario",
    "standard_2x2",
    "survival_fractions",
    "verify_reality",
    "weak_value",
    "weak_value_propagated",
]
