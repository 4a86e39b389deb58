"""Pseudo-spectral simulator for Schrodinger-Poisson systems with unbounded kernels."""

from ._core import (
    Grid,
    Simulation,
    check_1d_bound,
    check_k_bound,
    decomposed_potential,
    energy_breakdown,
    full_newtonian,
    grad_norm_squared,
    k_function,
    l2_norm_squared,
    linear_propagator_step,
    make_datum,
    make_grid,
    pde_residual,
    picard_iterate,
    preset_json,
    preset_names,
    run_scenario_json,
    spectral_gradient,
    sweep_preset_json,
    sweep_preset_names,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "Simulation",
    "check_1d_bound",
    "check_k_bound",
    "decomposed_potential",
    "energy_breakdown",
    "full_newtonian",
    "grad_norm_squared",
    "k_function",
    "l2_norm_squared",
    "linear_propagator_step",
    "make_datum",
    "make_grid",
    "pde_residual",
    "picard_iterate",
    "preset_json",
    "preset_names",
    "run_scenario_json",
    "spectral_gradient",
    "sweep_preset_json",
    "sweep_preset_names",
    "__version__",
]
