"""Product-formula quantum simulation with entanglement-aware error bounds."""

from .adaptive import (
    AdaptivePlan,
    AdaptiveRunResult,
    GateCostModel,
    adaptive_gate_cost,
    gate_cost,
    resolve_interval_steps,
    run_adaptive,
)
from .bounds import (
    BoundReport,
    ErrorTermSet,
    SplitBoundData,
    average_case_bound,
    converged_segmented_steps,
    distance_based_bound,
    entanglement_based_bound,
    leading_error_terms,
    light_cone_bound,
    mps_cost_model,
    pf1_concrete_bound,
    pf2_concrete_bound,
    purity_based_bound,
    refined_pauli_bound,
    segmented_bound_steps,
    worst_case_bound,
)
from .entanglement import (
    DensityMatrix,
    UniformityReport,
    dist_to_maximally_mixed,
    k_uniformity,
    mutual_information,
    reduced_density_matrix,
    renyi2_entropy,
    von_neumann_entropy,
)
from .errors import (
    ContractViolationError,
    DimensionMismatchError,
    InvalidOperatorError,
    ModelError,
    NoSolutionError,
    ResourceLimitError,
    TrotterKitError,
)
from .formulas import (
    FormulaSpec,
    TrajectoryRecord,
    composed_difference_norms,
    empirical_step_error,
    empirical_total_error,
    fit_loglog_slope,
    min_steps_search,
    operator_norm_error,
    pf_step,
    pf_trajectory,
    record_trajectory,
    suzuki_coefficient,
)
from .pauli import (
    HamiltonianSplit,
    PauliSum,
    PauliTerm,
    build_heisenberg,
    build_qimf,
    commutator,
    frobenius_norm,
    nested_commutator_norm_sum,
    one_norm,
    spectral_norm_dense,
)
from .shadows import (
    ShadowSet,
    ShadowSnapshot,
    collect_shadows,
    estimate_pauli,
    estimate_purity,
    estimate_trotter_error,
    load_shadows,
    refined_error_observable,
    save_shadows,
)
from .states import (
    ExactEvolver,
    StateVector,
    apply_group_exponential,
    apply_pauli_sum,
    basis_state,
    expectation,
    export_state,
    graph_state,
    import_state,
    product_state,
    random_state,
    sample_bits,
    zero_state,
)
from .worstcase import (
    StabilizerProductState,
    build_worst_case_state,
    check_worst_case_conditions,
    verify_worst_case_scaling,
)

__version__ = "0.1.0"
