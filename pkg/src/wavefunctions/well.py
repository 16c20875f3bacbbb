"""One coordinate of the separable two-dimensional infinite square well."""

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from src.wavefunctions.base import Scenario


@dataclass(frozen=True)
class SquareWellMode(Scenario):
    """psi = sqrt(1/L) (sin(pi x/L) e^{-i E1 t/hbar} + sin(2 pi x/L) e^{-i 4 E1 t/hbar}).

    E1 = pi^2 hbar^2 / (2 m L^2). The domain is the well [0, L].
    """

    required_constants: ClassVar[tuple[str, ...]] = ("hbar", "m", "width")

    @property
    def ground_energy(self) -> float:
        width = self.const("width")
        return math.pi**2 * self.const("hbar") ** 2 / (2.0 * self.const("m") * width**2)

    def _modes(self, x: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        width = self.const("width")
        k = math.pi / width
        x = np.asarray(x, dtype=float)
        theta = self.ground_energy * np.asarray(t, dtype=float) / self.const("hbar")
        first = np.exp(-1j * theta)
        second = np.exp(-4j * theta)
        scale = 1.0 / math.sqrt(width)
        value = scale * (np.sin(k * x) * first + np.sin(2.0 * k * x) * second)
        slope = scale * (k * np.cos(k * x) * first + 2.0 * k * np.cos(2.0 * k * x) * second)
        return value, slope

    def psi(self, x: np.ndarray, t: float) -> np.ndarray:
        value, _ = self._modes(x, t)
        return value

    def dpsi_dx(self, x: np.ndarray, t: float) -> np.ndarray:
        _, slope = self._modes(x, t)
        return slope
