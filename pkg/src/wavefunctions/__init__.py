from src.wavefunctions.base import Scenario, ScenarioKind, TimeGrid
from src.wavefunctions.catalog import (
    REFERENCE_RUNS,
    SCENARIO_REGISTRY,
    ReferenceRun,
    build_scenario,
    list_scenarios,
    square_well_2d,
)
from src.wavefunctions.fields import (
    RHO_MAX_SAFETY,
    VELOCITY_FLOOR,
    estimate_rho_max,
    eval_psi,
    eval_rho,
    eval_velocity,
    normalization,
)
from src.wavefunctions.harmonic import hermite_table

__all__ = [
    "Scenario",
    "ScenarioKind",
    "TimeGrid",
    "REFERENCE_RUNS",
    "SCENARIO_REGISTRY",
    "ReferenceRun",
    "build_scenario",
    "list_scenarios",
    "square_well_2d",
    "RHO_MAX_SAFETY",
    "VELOCITY_FLOOR",
    "estimate_rho_max",
    "eval_psi",
    "eval_rho",
    "eval_velocity",
    "normalization",
    "hermite_table",
]
