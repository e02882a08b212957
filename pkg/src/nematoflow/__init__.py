"""Pseudospectral solver for non-isothermal nematic liquid crystal flow.

The package couples an incompressible velocity field, an absolute
temperature, and a Ginzburg-Landau penalized director field on a 3D
periodic box, with temperature-dependent viscosity and elastic coupling
coefficients.  Alongside the time stepper it ships a verification
harness: energy-law diagnostics, maximum-principle monitors, and
scripted convergence / stability experiments.
"""

from .coefficients import (
    CoefficientBounds,
    CoefficientModel,
    ValidationReport,
    capital_lambda_eval,
    ginzburg_landau,
    gronwall_constant_K,
    make_model,
    validate_assumptions,
)
from .spectral import Grid
from .stepper import PicardConvergenceError, State, StepConfig, picard_advance, pressure_solve
from .diagnostics import (
    DiagnosticsRecord,
    PrincipleViolationError,
    blowup_monitor,
    compute_record,
    dissipation,
    energy_balance_residual,
    high_order_functionals,
    principle_checks,
    total_energy,
)
from .config import ConfigError, RunConfig, load_config
from .runner import make_initial_data, run

__all__ = [
    "CoefficientBounds",
    "CoefficientModel",
    "ValidationReport",
    "capital_lambda_eval",
    "ginzburg_landau",
    "gronwall_constant_K",
    "make_model",
    "validate_assumptions",
    "Grid",
    "PicardConvergenceError",
    "State",
    "StepConfig",
    "picard_advance",
    "pressure_solve",
    "DiagnosticsRecord",
    "PrincipleViolationError",
    "blowup_monitor",
    "compute_record",
    "dissipation",
    "energy_balance_residual",
    "high_order_functionals",
    "principle_checks",
    "total_energy",
    "ConfigError",
    "RunConfig",
    "load_config",
    "make_initial_data",
    "run",
]

__version__ = "0.1.0"
