"""Density-only scenarios (no wavefunction behind them)."""

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from src.wavefunctions.base import Scenario, ScenarioKind


@dataclass(frozen=True)
class UniformDensity(Scenario):
    kind: ScenarioKind = ScenarioKind.DENSITY

    def rho(self, x: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x_lo, x_hi = self.domain
        inside = (x >= x_lo) & (x <= x_hi)
        shape = np.broadcast(x, np.asarray(t, dtype=float)).shape
        return np.broadcast_to(np.where(inside, 1.0 / self.length, 0.0), shape).copy()


@dataclass(frozen=True)
class DiffusingGaussian(Scenario):
    """Heat-kernel spreading: rho = N(0, sigma0^2 + 2 D t).

    A non-quantum density; its quantile trajectories are
    x_P(t) = x_P(0) sqrt(1 + 2 D t / sigma0^2).
    """

    kind: ScenarioKind = ScenarioKind.DENSITY
    required_constants: ClassVar[tuple[str, ...]] = ("sigma0", "diffusivity")

    def variance_at(self, t: float) -> np.ndarray:
        return self.const("sigma0") ** 2 + 2.0 * self.const("diffusivity") * np.asarray(t, dtype=float)

    def rho(self, x: np.ndarray, t: float) -> np.ndarray:
        variance = self.variance_at(t)
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * x**2 / variance) / np.sqrt(2.0 * math.pi * variance)
