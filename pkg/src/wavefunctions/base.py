"""Scenario and time-grid types for closed-form densities.

A scenario is a named time-dependent density rho(x, t) on a bounded domain, optionally
backed by a complex wavefunction psi(x, t). Scenarios are frozen after construction and
every method is a pure function of its arguments, so one instance can be shared freely
between threads.

Positions accept numpy arrays (any shape) and times accept scalars or arrays that
broadcast against them.
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import ClassVar, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.errors import ConfigValidationError, UnsupportedOperationError


class ScenarioKind(str, Enum):
    """Whether a scenario carries a wavefunction or only a density."""

    WAVEFUNCTION = "wavefunction"
    DENSITY = "density"


class TimeGrid(BaseModel):
    """Uniform discrete times t_n = t0 + n*dt for n = 0..steps (both endpoints included)."""

    model_config = ConfigDict(frozen=True)

    t0: float = Field(default=0.0, description="Initial time")
    dt: float = Field(gt=0.0, description="Time step")
    steps: int = Field(ge=1, description="Number of steps after t0")

    @classmethod
    def from_range(cls, t0: float, t1: float, dt: float) -> "TimeGrid":
        if not t1 > t0:
            raise ConfigValidationError(f"time range must satisfy t0 < t1, got [{t0}, {t1}]")
        if not dt > 0:
            raise ConfigValidationError(f"time step must be positive, got {dt}")
        steps = max(1, int(round((t1 - t0) / dt)))
        grid = cls(t0=t0, dt=dt, steps=steps)
        if abs(grid.t1 - t1) > dt / 2:
            raise ConfigValidationError(
                f"dt={dt} cannot cover [{t0}, {t1}] to within dt/2 (last time {grid.t1})"
            )
        return grid

    @property
    def t1(self) -> float:
        return self.t0 + self.steps * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1, dtype=float)

    def time(self, n: int) -> float:
        return self.t0 + n * self.dt


@dataclass(frozen=True)
class Scenario:
    """A named density on [x_lo, x_hi] x [t0, t1].

    Subclasses provide ``psi`` (and optionally an analytic ``dpsi_dx``) for
    wavefunction-backed scenarios, or override ``rho`` for density-only ones.
    """

    name: str
    constants: tuple[tuple[str, float], ...]
    domain: tuple[float, float]
    t_range: tuple[float, float]
    kind: ScenarioKind = ScenarioKind.WAVEFUNCTION

    required_constants: ClassVar[tuple[str, ...]] = ()

    def __post_init__(self) -> None:
        x_lo, x_hi = self.domain
        if not x_lo < x_hi:
            raise ConfigValidationError(f"{self.name}: domain needs x_lo < x_hi, got {self.domain}")
        t0, t1 = self.t_range
        if not t0 < t1:
            raise ConfigValidationError(f"{self.name}: t_range needs t0 < t1, got {self.t_range}")
        names = {key for key, _ in self.constants}
        missing = [key for key in self.required_constants if key not in names]
        if missing:
            raise ConfigValidationError(f"{self.name}: missing constants {missing}")
        for key, value in self.constants:
            if not (np.isfinite(value) and value > 0):
                raise ConfigValidationError(
                    f"{self.name}: constant '{key}' must be finite and positive, got {value}"
                )

    @cached_property
    def params(self) -> dict[str, float]:
        return dict(self.constants)

    def const(self, key: str) -> float:
        return self.params[key]

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def is_wavefunction(self) -> bool:
        return self.kind == ScenarioKind.WAVEFUNCTION

    def psi(self, x: np.ndarray, t: float) -> np.ndarray:
        raise UnsupportedOperationError(f"scenario '{self.name}' is density-only; no wavefunction")

    def dpsi_dx(self, x: np.ndarray, t: float) -> Optional[np.ndarray]:
        """Analytic spatial derivative of psi, or None when only finite differences apply."""
        return None

    def rho(self, x: np.ndarray, t: float) -> np.ndarray:
        amplitude = self.psi(x, t)
        return amplitude.real**2 + amplitude.imag**2

    def with_constants(self, **overrides: float) -> "Scenario":
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise ConfigValidationError(f"{self.name}: unknown constants {sorted(unknown)}")
        merged = {**self.params, **{k: float(v) for k, v in overrides.items()}}
        return replace(self, constants=tuple(sorted(merged.items())))


def pack_constants(**values: float) -> tuple[tuple[str, float], ...]:
    return tuple(sorted((key, float(value)) for key, value in values.items()))
