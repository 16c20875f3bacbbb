"""Evaluation of psi, rho and the Bohm velocity field, plus density bounds."""

import logging
from typing import Literal, Optional

import numpy as np
from scipy.integrate import trapezoid

from src.errors import ConfigValidationError, NodeRegionError, UnsupportedOperationError
from src.wavefunctions.base import Scenario

logger = logging.getLogger(__name__)

VELOCITY_FLOOR = 1e-12
FD_STEP_FRACTION = 1e-6
RHO_MAX_SAFETY = 1.1
MIN_BOUND_RESOLUTION = 64

VelocityMethod = Literal["auto", "analytic", "finite-difference"]


def eval_psi(scenario: Scenario, x: np.ndarray, t: float) -> np.ndarray:
    if not scenario.is_wavefunction:
        raise UnsupportedOperationError(f"scenario '{scenario.name}' has no wavefunction")
    return scenario.psi(np.asarray(x, dtype=float), t)[()]


def eval_rho(scenario: Scenario, x: np.ndarray, t: float) -> np.ndarray:
    return scenario.rho(np.asarray(x, dtype=float), t)[()]


def eval_velocity(
    scenario: Scenario,
    x: np.ndarray,
    t: float,
    method: VelocityMethod = "auto",
    floor: float = VELOCITY_FLOOR,
) -> np.ndarray:
    """Bohm velocity (hbar/m) Im(psi* dpsi/dx) / rho.

    ``auto`` uses the analytic derivative when the scenario provides one and a central
    difference with step L * 1e-6 otherwise. Raises NodeRegionError where rho < floor.
    """
    if not scenario.is_wavefunction:
        raise UnsupportedOperationError(
            f"scenario '{scenario.name}' is density-only; velocity needs a wavefunction"
        )
    x = np.asarray(x, dtype=float)
    amplitude = scenario.psi(x, t)
    rho = amplitude.real**2 + amplitude.imag**2

    low = rho < floor
    if np.any(low):
        index = np.unravel_index(int(np.argmax(low)), rho.shape) if rho.ndim else ()
        x_bad = float(np.broadcast_to(x, rho.shape)[index])
        t_bad = float(np.broadcast_to(np.asarray(t, dtype=float), rho.shape)[index])
        raise NodeRegionError(x_bad, t_bad, float(rho[index]), floor)

    slope: Optional[np.ndarray] = None
    if method in ("auto", "analytic"):
        slope = scenario.dpsi_dx(x, t)
        if slope is None and method == "analytic":
            raise UnsupportedOperationError(
                f"scenario '{scenario.name}' provides no analytic derivative"
            )
    if slope is None:
        h = scenario.length * FD_STEP_FRACTION
        slope = (scenario.psi(x + h, t) - scenario.psi(x - h, t)) / (2.0 * h)

    current = np.imag(np.conj(amplitude) * slope)
    velocity = scenario.const("hbar") / scenario.const("m") * current / rho
    return velocity[()]


def estimate_rho_max(
    scenario: Scenario,
    nx: int = 2048,
    nt: int = 128,
    t_range: Optional[tuple[float, float]] = None,
) -> float:
    """Grid maximum of rho over domain x time range, times the 1.1 safety factor."""
    if nx < MIN_BOUND_RESOLUTION or nt < MIN_BOUND_RESOLUTION:
        raise ConfigValidationError(
            f"rho_max grid needs >= {MIN_BOUND_RESOLUTION} points per axis, got ({nx}, {nt})"
        )
    t0, t1 = t_range if t_range is not None else scenario.t_range
    xs = np.linspace(scenario.domain[0], scenario.domain[1], nx)
    times = [t0] if t1 == t0 else np.linspace(t0, t1, nt)

    peak = 0.0
    for t in times:
        peak = max(peak, float(np.max(scenario.rho(xs, float(t)))))
    bound = peak * RHO_MAX_SAFETY
    logger.debug("rho_max for %s: grid max %.6g, bound %.6g", scenario.name, peak, bound)
    return bound


def normalization(scenario: Scenario, t: float, points: int = 4096) -> float:
    """Trapezoid integral of rho over the scenario domain at time t."""
    xs = np.linspace(scenario.domain[0], scenario.domain[1], points)
    return float(trapezoid(scenario.rho(xs, t), xs))
