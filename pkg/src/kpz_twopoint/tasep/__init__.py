from .sim import (
    SimConfig,
    LatticeState,
    TwoPointEstimate,
    Ensemble,
    PmfEstimate,
    PairingResult,
    DominanceReport,
    auto_ring_size,
    rng_for_run,
    init_stationary,
    init_step,
    evolve,
    height,
    height_profile,
    run_ensemble,
    estimate_S,
    sum_rule_report,
    laplacian_var_S,
    second_class_pmf,
    second_class_displacements,
    empirical_Fw,
    rescaled_height_samples,
    rescaled_position,
    height_center,
    step_ic_dominance,
    weak_pairing,
    bump_test_function,
)
from .records import read_run_records, write_run_records
from .kernels import USE_NUMBA
