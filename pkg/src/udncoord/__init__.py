"""Joint pairing, partitioning and power coordination for dense wireless networks."""

from .assignment import Assignment, CoordinationSolution, SolverStats, validate_assignment
from .errors import (
    CapacityError,
    ConstraintViolationError,
    ConvergenceError,
    CoordinationError,
    InfeasibleError,
)
from .exact import (
    assignment_feasible,
    interference_free_bound,
    solve_fixed_pairing,
    solve_joint_ppp,
)
from .greedy import (
    GreedyConfig,
    InterferenceWeights,
    baseline_full_orthogonalization,
    baseline_full_spatial_reuse,
    interference_weight_matrix,
    pair_best_gain,
    power_aware_partition,
    power_unaware_assignment,
    power_unaware_partition,
    random_partition_assignment,
)
from .harness import (
    RunRecord,
    ScenarioSpec,
    dynamic_n_intra_an,
    emit_results,
    exhaustive_best_n,
    run_algorithm,
    run_scenario,
    summarize,
)
from .ilp import IlpModel, export_ilp, parse_solution_file, point_from_solution, write_mps
from .network import (
    Deployment,
    NetworkInstance,
    SystemConfig,
    compute_gains,
    dbm_to_watts,
    generate_deployment,
    generate_instance,
    load_instance,
    save_instance,
    watts_to_dbm,
)
from .power import (
    GroupRateCache,
    PartitionGroup,
    PerronBoundParams,
    approx_common_sinr,
    build_partition_group,
    common_rate,
    evaluate_assignment,
    group_from_gain_matrix,
    group_sinrs,
    optimal_common_sinr,
    optimal_power_vector,
    perron_root,
    power_for_target_sinr,
    sinr_bounds,
)

__version__ = "0.1.0"
