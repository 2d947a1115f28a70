"""Partition-based caching under successive interference cancellation.

Closed-form success probabilities, cache-budget optimization with a proven
approximation guarantee, asymptotic optima, and an independent Monte Carlo
simulator for cross-validation.
"""

from .analysis import (
    SicNoiseFactor,
    StpBreakdown,
    coupon_pmf,
    per_bs_decode_prob,
    sic_chain_success,
    sic_noise_factor,
    stp_rlnc,
    stp_rlnc_file,
    stp_rlnc_large_s,
    stp_rlnc_small_s,
    stp_uc,
    stp_uc_file,
    stp_uc_large_s,
    stp_uc_small_s,
)
from .model import (
    AllocationError,
    ConfigError,
    Popularity,
    RlncAllocation,
    SystemConfig,
    UcAllocation,
    cache_load,
    default_serve_counts,
    load_config,
    validate_rlnc,
    validate_uc,
    zipf_popularity,
)
from .optimize import (
    BudgetExceededError,
    MckpInstance,
    MckpSelection,
    OptimizationResult,
    UnsupportedInstanceError,
    asymptotic_opt_rlnc_large,
    asymptotic_opt_rlnc_small,
    asymptotic_opt_uc_large,
    build_mckp,
    greedy_mckp,
    solve_rlnc,
    solve_uc,
    undominated_indices,
)
from .simulate import (
    DEFAULT_DISC_SCALE,
    McEstimate,
    NetworkRealization,
    SimulationError,
    SimulationResult,
    SubfilePlacement,
    sample_network,
    sic_decode_chain,
    simulate_baseline,
    simulate_rlnc,
    simulate_uc,
    subfile_cover_index,
    water_fill_mu,
)
from .special import QuadratureSpec, beta, beta_complement

__version__ = "0.1.0"

__all__ = [
    "AllocationError",
    "BudgetExceededError",
    "ConfigError",
    "DEFAULT_DISC_SCALE",
    "McEstimate",
    "MckpInstance",
    "MckpSelection",
    "NetworkRealization",
    "OptimizationResult",
    "UnsupportedInstanceError",
    "Popularity",
    "QuadratureSpec",
    "RlncAllocation",
    "SimulationError",
    "SicNoiseFactor",
    "SimulationResult",
    "StpBreakdown",
    "SubfilePlacement",
    "SystemConfig",
    "UcAllocation",
    "asymptotic_opt_rlnc_large",
    "asymptotic_opt_rlnc_small",
    "asymptotic_opt_uc_large",
    "beta",
    "beta_complement",
    "build_mckp",
    "cache_load",
    "coupon_pmf",
    "default_serve_counts",
    "greedy_mckp",
    "load_config",
    "per_bs_decode_prob",
    "sample_network",
    "sic_chain_success",
    "sic_decode_chain",
    "sic_noise_factor",
    "simulate_baseline",
    "simulate_rlnc",
    "simulate_uc",
    "solve_rlnc",
    "solve_uc",
    "stp_rlnc",
    "stp_rlnc_file",
    "stp_rlnc_large_s",
    "stp_rlnc_small_s",
    "stp_uc",
    "stp_uc_file",
    "stp_uc_large_s",
    "stp_uc_small_s",
    "subfile_cover_index",
    "undominated_indices",
    "validate_rlnc",
    "validate_uc",
    "water_fill_mu",
    "zipf_popularity",
    "__version__",
]
