"""Harmonic-oscillator wavefunctions: equal-weight superpositions of eigenstates."""

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from src.wavefunctions.base import Scenario


def hermite_table(z: np.ndarray, n_max: int) -> np.ndarray:
    """Physicists' Hermite polynomials H_0..H_n_max at z by three-term recurrence.

    H_{n+1}(z) = 2 z H_n(z) - 2 n H_{n-1}(z). Returns shape (n_max + 1, *z.shape).
    """
    z = np.asarray(z, dtype=float)
    table = np.empty((n_max + 1,) + z.shape, dtype=float)
    table[0] = 1.0
    if n_max >= 1:
        table[1] = 2.0 * z
    for n in range(1, n_max):
        table[n + 1] = 2.0 * z * table[n] - 2.0 * n * table[n - 1]
    return table


@dataclass(frozen=True)
class HarmonicSuperposition(Scenario):
    """psi = N e^{-x^2/2a^2} sum_n H_n(x/a) e^{-i E_n t/hbar} / sqrt(n! 2^n), equal weights.

    a = sqrt(hbar / m omega), E_n = hbar omega (n + 1/2). With levels (0, 1, 3, 5) the
    prefactor is 1 / (2 sqrt(a sqrt(pi))).
    """

    required_constants: ClassVar[tuple[str, ...]] = ("hbar", "m", "omega")
    levels: ClassVar[tuple[int, ...]] = (0, 1, 3, 5)

    @property
    def width(self) -> float:
        return math.sqrt(self.const("hbar") / (self.const("m") * self.const("omega")))

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.const("omega")

    def _terms(self, x: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        omega = self.const("omega")
        a = self.width
        z = np.asarray(x, dtype=float) / a
        top = max(self.levels)
        table = hermite_table(z, top)
        envelope = np.exp(-0.5 * z**2) / math.sqrt(a * math.sqrt(math.pi) * len(self.levels))
        t = np.asarray(t, dtype=float)

        value = np.zeros(np.broadcast(z, t).shape, dtype=complex)
        slope = np.zeros_like(value)
        for n in self.levels:
            norm = 1.0 / math.sqrt(math.factorial(n) * 2.0**n)
            phase = np.exp(-1j * omega * (n + 0.5) * t)
            h_prev = table[n - 1] if n >= 1 else 0.0
            value += norm * table[n] * phase
            # d/dz [e^{-z^2/2} H_n] = e^{-z^2/2} (2n H_{n-1} - z H_n)
            slope += norm * (2.0 * n * h_prev - z * table[n]) * phase
        return envelope * value, envelope * slope / a

    def psi(self, x: np.ndarray, t: float) -> np.ndarray:
        value, _ = self._terms(x, t)
        return value

    def dpsi_dx(self, x: np.ndarray, t: float) -> np.ndarray:
        _, slope = self._terms(x, t)
        return slope


@dataclass(frozen=True)
class HarmonicEigenstate(HarmonicSuperposition):
    """Single stationary ground state; its density is time-independent and v = 0."""

    levels: ClassVar[tuple[int, ...]] = (0,)
