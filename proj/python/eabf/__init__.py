"""EAB barring-factor random access: analytic recursion, energy model, simulator and optimizer."""

from ._core import (
    ActivationProfile,
    BarringSetting,
    ConfigError,
    ConstraintSpec,
    ContentionTiming,
    DomainError,
    EnergyConfig,
    GridSpec,
    MetricsReport,
    NonConvergenceError,
    Scenario,
    SimOptions,
    SimulationError,
    access_intensities,
    config_hash,
    evaluate_setting,
    expected_collisions,
    max_rars_per_subframe,
    minimize_energy,
    rar_burst_energy,
    run_monte_carlo,
    run_recursion,
    standard_settings,
    sweep_grid,
    tradeoff_curve,
)

__all__ = [
    "ActivationProfile",
    "BarringSetting",
    "ConfigError",
    "ConstraintSpec",
    "ContentionTiming",
    "DomainError",
    "EnergyConfig",
    "GridSpec",
    "MetricsReport",
    "NonConvergenceError",
    "Scenario",
    "SimOptions",
    "SimulationError",
    "access_intensities",
    "config_hash",
    "evaluate_setting",
    "expected_collisions",
    "max_rars_per_subframe",
    "minimize_energy",
    "rar_burst_energy",
    "run_monte_carlo",
    "run_recursion",
    "standard_settings",
    "sweep_grid",
    "tradeoff_curve",
]
