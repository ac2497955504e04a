"""Randomized content caching in stochastic-geometry heterogeneous networks.

Library layout:
  spatial      Poisson point processes on disks
  core         network parameters, profiles/strategies, closed-form loss
  simulation   Monte Carlo miss events and Poisson request traces
  estimation   empirical and transfer-learning popularity estimators
  bounds       waiting-time bounds and source-sample requirements
  optimizer    projected-gradient solver plus waterfilling/grid oracles
  experiments  experiment specs, runners, and CSV/JSON reports
"""
from ._version import __version__
from .bounds import (
    AccuracyInfeasibleError,
    BoundInputs,
    SourceSampleRequirement,
    WaitingTimeBound,
    epsilon_bar,
    g_sensitivity,
    sup_g_sum,
    tl_min_source_samples,
    waiting_time_simplified,
    waiting_time_target,
    waiting_time_tl,
)
from .core import (
    CacheContents,
    CachingStrategy,
    NetworkConfig,
    PopularityProfile,
    miss_probability,
    offloading_loss,
    sample_cache,
    uniform_strategy,
    zipf_profile,
)
from .estimation import (
    CountVector,
    NoSamplesError,
    estimate_popularity,
    profile_from_counts,
    source_counts,
    sup_distance,
    target_counts,
    tl_estimate,
)
from .experiments import (
    ConfigError,
    ExperimentSpec,
    Report,
    load_spec,
    parse_spec,
    run_bounds,
    run_experiment,
    run_optimize,
    run_tl_comparison,
    run_validate_theorem1,
    run_waiting_time_sweep,
)
from .optimizer import (
    GridOptimum,
    SolverOptions,
    SolverResult,
    brute_force_optimum,
    loss_gradient,
    optimize_strategy,
    project_simplex,
    waterfilling_M1,
)
from .simulation import (
    LossEstimate,
    RequestLog,
    SourceSamples,
    UserRequests,
    generate_requests,
    generate_source_samples,
    mc_offloading_loss,
    simulate_miss_event,
)
from .spatial import PointSet, Region, count_within, sample_ppp

__all__ = [
    "__version__",
    "AccuracyInfeasibleError",
    "BoundInputs",
    "CacheContents",
    "CachingStrategy",
    "ConfigError",
    "CountVector",
    "ExperimentSpec",
    "GridOptimum",
    "LossEstimate",
    "NetworkConfig",
    "NoSamplesError",
    "PointSet",
    "PopularityProfile",
    "Region",
    "Report",
    "RequestLog",
    "SolverOptions",
    "SolverResult",
    "SourceSampleRequirement",
    "SourceSamples",
    "UserRequests",
    "WaitingTimeBound",
    "brute_force_optimum",
    "count_within",
    "epsilon_bar",
    "estimate_popularity",
    "g_sensitivity",
    "generate_requests",
    "generate_source_samples",
    "load_spec",
    "loss_gradient",
    "mc_offloading_loss",
    "miss_probability",
    "offloading_loss",
    "optimize_strategy",
    "parse_spec",
    "profile_from_counts",
    "project_simplex",
    "run_bounds",
    "run_experiment",
    "run_optimize",
    "run_tl_comparison",
    "run_validate_theorem1",
    "run_waiting_time_sweep",
    "sample_cache",
    "sample_ppp",
    "simulate_miss_event",
    "source_counts",
    "sup_distance",
    "sup_g_sum",
    "target_counts",
    "tl_estimate",
    "tl_min_source_samples",
    "uniform_strategy",
    "waiting_time_simplified",
    "waiting_time_target",
    "waiting_time_tl",
    "waterfilling_M1",
    "zipf_profile",
]
