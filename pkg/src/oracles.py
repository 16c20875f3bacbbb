"""Reference Bohm trajectories by two independent routes.

* quantile motion: the trajectory labelled P is x_P(t) = CPF^{-1}(P, t), found by
  inverting the trapezoid CPF at every grid time; no differential equation is solved.
* guidance law: dx/dt = v(x, t) integrated with fixed-step classical RK4.

Both are used as yardsticks for the Monte Carlo ensembles.
"""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from src.cpf_store import DEFAULT_POINTS, get_store
from src.errors import (
    NodeEncounterError,
    NodeRegionError,
    QuantileBoundaryError,
    UnsupportedOperationError,
)
from src.wavefunctions import VELOCITY_FLOOR, Scenario, TimeGrid, eval_velocity

logger = logging.getLogger(__name__)


class Solver(str, Enum):
    QUANTILE = "quantile"
    GUIDANCE = "guidance"


@dataclass(frozen=True)
class OracleTolerances:
    quadrature_points: int = DEFAULT_POINTS
    bisection_rel_tol: float = 1e-10
    rk4_substeps: int = 10
    velocity_floor: float = VELOCITY_FLOOR

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


DEFAULT_TOLERANCES = OracleTolerances()


@dataclass(frozen=True)
class OracleTrajectory:
    """Reference positions on a grid.

    ``label`` is the conserved quantile P for the quantile solver and the launch
    position x0 for the guidance solver. ``densities`` holds rho along the path.
    """

    grid: TimeGrid
    positions: np.ndarray
    solver: Solver
    label: float
    scenario_name: str
    tolerances: OracleTolerances = DEFAULT_TOLERANCES
    densities: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def p(self) -> Optional[float]:
        return self.label if self.solver == Solver.QUANTILE else None

    @property
    def x0(self) -> float:
        return self.label if self.solver == Solver.GUIDANCE else float(self.positions[0])


def cpf(
    scenario: Scenario, x: np.ndarray, t: float, tolerances: OracleTolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Left probability of x at time t; x outside the domain is clamped."""
    return get_store().table(scenario, t, tolerances.quadrature_points).evaluate(x)


def invert_cpf(
    scenario: Scenario, p: float, t: float, tolerances: OracleTolerances = DEFAULT_TOLERANCES
) -> float:
    if not 0.0 < p < 1.0:
        raise QuantileBoundaryError(p)
    table = get_store().table(scenario, t, tolerances.quadrature_points)
    return table.invert(p, tolerances.bisection_rel_tol * scenario.length)


def quantile_trajectory(
    scenario: Scenario,
    p: float,
    grid: TimeGrid,
    tolerances: OracleTolerances = DEFAULT_TOLERANCES,
) -> OracleTrajectory:
    if not 0.0 < p < 1.0:
        raise QuantileBoundaryError(p)
    times = grid.times
    positions = np.array([invert_cpf(scenario, p, float(t), tolerances) for t in times])
    densities = np.array([float(scenario.rho(x, float(t))) for x, t in zip(positions, times)])
    return OracleTrajectory(
        grid=grid,
        positions=positions,
        solver=Solver.QUANTILE,
        label=float(p),
        scenario_name=scenario.name,
        tolerances=tolerances,
        densities=densities,
    )


def guidance_trajectory(
    scenario: Scenario,
    x0: float,
    grid: TimeGrid,
    tolerances: OracleTolerances = DEFAULT_TOLERANCES,
) -> OracleTrajectory:
    """RK4 on dx/dt = v(x, t) with ``rk4_substeps`` substeps per grid step.

    Raises NodeEncounterError (with the last completed grid step) when the path enters
    a region where rho is below the velocity floor.
    """
    if not scenario.is_wavefunction:
        raise UnsupportedOperationError(
            f"scenario '{scenario.name}' is density-only; guidance needs a wavefunction"
        )
    floor = tolerances.velocity_floor
    h = grid.dt / tolerances.rk4_substeps
    positions = np.empty(grid.steps + 1)
    positions[0] = x = float(x0)

    def velocity(xv: float, tv: float, step: int) -> float:
        try:
            return float(eval_velocity(scenario, xv, tv, floor=floor))
        except NodeRegionError as exc:
            last = float(positions[step]) if step >= 0 else None
            raise NodeEncounterError(exc.x, exc.t, exc.rho, exc.floor, step, last) from exc

    velocity(x, grid.t0, -1)
    for n in range(grid.steps):
        start = grid.time(n)
        for k in range(tolerances.rk4_substeps):
            t = start + k * h
            k1 = velocity(x, t, n)
            k2 = velocity(x + 0.5 * h * k1, t + 0.5 * h, n)
            k3 = velocity(x + 0.5 * h * k2, t + 0.5 * h, n)
            k4 = velocity(x + h * k3, t + h, n)
            x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        positions[n + 1] = x

    densities = np.array(
        [float(scenario.rho(xv, float(t))) for xv, t in zip(positions, grid.times)]
    )
    return OracleTrajectory(
        grid=grid,
        positions=positions,
        solver=Solver.GUIDANCE,
        label=float(x0),
        scenario_name=scenario.name,
        tolerances=tolerances,
        densities=densities,
    )


def quantile_oracles(
    scenario: Scenario,
    quantiles: Sequence[float],
    grid: TimeGrid,
    tolerances: OracleTolerances = DEFAULT_TOLERANCES,
) -> list[OracleTrajectory]:
    get_store().prewarm(scenario, grid.times, tolerances.quadrature_points)
    return [quantile_trajectory(scenario, p, grid, tolerances) for p in quantiles]


def guidance_oracles(
    scenario: Scenario,
    starts: Sequence[float],
    grid: TimeGrid,
    tolerances: OracleTolerances = DEFAULT_TOLERANCES,
) -> list[OracleTrajectory]:
    return [guidance_trajectory(scenario, x0, grid, tolerances) for x0 in starts]
