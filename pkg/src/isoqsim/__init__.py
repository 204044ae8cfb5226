"""Exact few-qubit simulation of a discrete-step quantum isothermal process."""
from .channels import BathParams, StepParams, apply_gadc, make_step_params
from .protocol import (
    Schedule,
    WorkSummary,
    fit_power_law,
    free_energy_difference,
    geometric_schedule,
    linear_schedule,
    make_schedule,
    run_exact,
    run_fully_quantum,
    run_hybrid_enumerate,
    run_hybrid_montecarlo,
    scaling_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BathParams",
    "StepParams",
    "apply_gadc",
    "make_step_params",
    "Schedule",
    "WorkSummary",
    "fit_power_law",
    "free_energy_difference",
    "geometric_schedule",
    "linear_schedule",
    "make_schedule",
    "run_exact",
    "run_fully_quantum",
    "run_hybrid_enumerate",
    "run_hybrid_montecarlo",
    "scaling_sweep",
]
