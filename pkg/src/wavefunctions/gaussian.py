"""Freely spreading Gaussian packets: a single packet and the two-slit superposition."""

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from src.wavefunctions.base import Scenario


def gaussian_packet(
    x: np.ndarray, t: float, centre: float, a: float, hbar: float, m: float
) -> tuple[np.ndarray, np.ndarray]:
    """Free packet (2a/pi)^{1/4} e^{-a (x-c)^2 / (1 + i beta t)} / sqrt(1 + i beta t).

    beta = 2 hbar a / m. Returns (psi, dpsi/dx). The position standard deviation at
    t = 0 is 1 / (2 sqrt(a)).
    """
    beta = 2.0 * hbar * a / m
    spread = 1.0 + 1j * beta * np.asarray(t, dtype=float)
    shifted = np.asarray(x, dtype=float) - centre
    value = (2.0 * a / math.pi) ** 0.25 * np.exp(-a * shifted**2 / spread) / np.sqrt(spread)
    return value, value * (-2.0 * a * shifted / spread)


@dataclass(frozen=True)
class FreeGaussian(Scenario):
    """Free particle starting as a Gaussian of width parameter ``a`` centred at zero."""

    required_constants: ClassVar[tuple[str, ...]] = ("hbar", "m", "a")

    @property
    def sigma0(self) -> float:
        return 1.0 / (2.0 * math.sqrt(self.const("a")))

    @property
    def beta(self) -> float:
        return 2.0 * self.const("hbar") * self.const("a") / self.const("m")

    def width_at(self, t: float) -> float:
        """Position standard deviation sigma0 * sqrt(1 + beta^2 t^2)."""
        return self.sigma0 * math.sqrt(1.0 + (self.beta * t) ** 2)

    def psi(self, x: np.ndarray, t: float) -> np.ndarray:
        value, _ = gaussian_packet(x, t, 0.0, self.const("a"), self.const("hbar"), self.const("m"))
        return value

    def dpsi_dx(self, x: np.ndarray, t: float) -> np.ndarray:
        _, slope = gaussian_packet(x, t, 0.0, self.const("a"), self.const("hbar"), self.const("m"))
        return slope


@dataclass(frozen=True)
class TwoSlitGaussians(Scenario):
    """Two free packets leaving slits at +/- slit_offset with zero transverse momentum.

    Each packet has initial position spread ``slit_width``; the superposition is
    normalised with the (time-independent) overlap of the two packets. Motion along
    the slit-to-screen axis is uniform, so the density here is the transverse one.
    """

    required_constants: ClassVar[tuple[str, ...]] = (
        "hbar",
        "m",
        "slit_offset",
        "slit_width",
        "emit_length_scale",
        "emit_time_scale",
    )

    @property
    def packet_a(self) -> float:
        return 1.0 / (4.0 * self.const("slit_width") ** 2)

    @property
    def norm(self) -> float:
        overlap = math.exp(-2.0 * self.packet_a * self.const("slit_offset") ** 2)
        return 1.0 / math.sqrt(2.0 * (1.0 + overlap))

    def _packets(self, x: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        a, hbar, m = self.packet_a, self.const("hbar"), self.const("m")
        offset = self.const("slit_offset")
        upper, upper_slope = gaussian_packet(x, t, offset, a, hbar, m)
        lower, lower_slope = gaussian_packet(x, t, -offset, a, hbar, m)
        return self.norm * (upper + lower), self.norm * (upper_slope + lower_slope)

    def psi(self, x: np.ndarray, t: float) -> np.ndarray:
        value, _ = self._packets(x, t)
        return value

    def dpsi_dx(self, x: np.ndarray, t: float) -> np.ndarray:
        _, slope = self._packets(x, t)
        return slope
