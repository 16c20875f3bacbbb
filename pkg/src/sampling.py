"""Seeded von Neumann acceptance-rejection sampling and the N / dt selection rules."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from src.config import SamplerConfig
from src.errors import BoundViolationError, ConfigValidationError, SamplingStalledError
from src.wavefunctions import Scenario

logger = logging.getLogger(__name__)

PRNG_ID = "numpy.random.PCG64 seeded by SeedSequence(seed, spawn_key=(step,))"
NOMINAL_FACTOR = 1e3
SAFE_MARGIN = 10.0
MIN_BATCH = 256
MAX_BATCH = 4_000_000
MAX_PROPOSALS = 50_000_000

DensitySlice = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SampleBatch:
    t: float
    values: np.ndarray
    accepted_fraction: float
    proposed: int = 0

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass
class ParameterChoice:
    n_particles: int
    dt: float
    dt_ceiling: float
    nominal_n: int
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.warnings


def step_stream(seed: int, step: int) -> np.random.Generator:
    """Independent stream for one time step, derived from (master seed, step index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(step,))))


def rejection_sample(
    density: DensitySlice,
    domain: tuple[float, float],
    bound: float,
    n: int,
    stream: np.random.Generator,
    t: float = math.nan,
) -> SampleBatch:
    """Draw n points distributed as density / integral(density) over ``domain``.

    Candidates are (x, u) pairs, x uniform on the domain and u uniform on [0, bound];
    a candidate is accepted when u < density(x). Pairs are consumed from the stream in
    order, so the batch depends only on the stream state, not on internal batch sizes.
    """
    if n < 1:
        raise ConfigValidationError(f"sample count must be >= 1, got {n}")
    if not bound > 0:
        raise ConfigValidationError(f"density bound must be positive, got {bound}")
    x_lo, x_hi = domain
    width = x_hi - x_lo

    chunks: list[np.ndarray] = []
    have = 0
    proposed = 0
    rate = min(1.0, 1.0 / (bound * width))
    while have < n:
        need = n - have
        size = int(min(MAX_BATCH, max(MIN_BATCH, math.ceil(1.2 * need / rate))))
        draws = stream.random((size, 2))
        xs = x_lo + width * draws[:, 0]
        us = bound * draws[:, 1]
        rho = np.asarray(density(xs), dtype=float)

        over = rho > bound
        if np.any(over):
            worst = int(np.argmax(over))
            raise BoundViolationError(float(xs[worst]), float(rho[worst]), bound)

        hits = np.flatnonzero(us < rho)
        if hits.size >= need:
            chunks.append(xs[hits[:need]])
            proposed += int(hits[need - 1]) + 1
            have = n
            break
        chunks.append(xs[hits])
        proposed += size
        have += int(hits.size)
        if proposed > MAX_PROPOSALS:
            raise SamplingStalledError(
                f"only {have} of {n} points accepted after {proposed} proposals"
            )
        rate = max(have / proposed, 1e-6) if have else rate / 4.0

    values = np.concatenate(chunks)
    return SampleBatch(t=t, values=values, accepted_fraction=n / proposed, proposed=proposed)


def sample_density(
    scenario: Scenario, t: float, bound: float, n: int, stream: np.random.Generator
) -> SampleBatch:
    return rejection_sample(lambda xs: scenario.rho(xs, t), scenario.domain, bound, n, stream, t=t)


def choose_parameters(
    length: float,
    rho_max: float,
    epsilon: float,
    n_override: Optional[int] = None,
    dt_override: Optional[float] = None,
) -> ParameterChoice:
    """N ~ 2 L rho_max x 10^3 and dt = L / (epsilon N).

    The N*dt rule is a ceiling: an explicit dt at or below L / (epsilon N) passes. An
    explicit N that is not above 10 x 2 L rho_max is flagged rather than rejected.
    """
    for label, value in (("L", length), ("rho_max", rho_max), ("epsilon", epsilon)):
        if not value > 0:
            raise ConfigValidationError(f"{label} must be positive, got {value}")
    if n_override is not None and n_override < 1:
        raise ConfigValidationError(f"N must be positive, got {n_override}")
    if dt_override is not None and not dt_override > 0:
        raise ConfigValidationError(f"dt must be positive, got {dt_override}")

    scale = 2.0 * length * rho_max
    nominal = int(math.ceil(scale * NOMINAL_FACTOR))
    n = n_override if n_override is not None else nominal
    ceiling = length / (epsilon * n)
    dt = dt_override if dt_override is not None else ceiling

    warnings: list[str] = []
    if n_override is not None and not n > SAFE_MARGIN * scale:
        warnings.append(f"N={n} violates N >> 2 L rho_max = {scale:.6g}")
    if dt_override is not None and dt > ceiling * (1.0 + 1e-12):
        warnings.append(f"dt={dt:.6g} exceeds the L/(epsilon N) ceiling {ceiling:.6g}")
    return ParameterChoice(n_particles=n, dt=dt, dt_ceiling=ceiling, nominal_n=nominal, warnings=warnings)


def check_config(scenario: Scenario, config: SamplerConfig, rho_max: float) -> ParameterChoice:
    """Apply choose_parameters to an explicit config and log any rule violations."""
    choice = choose_parameters(
        scenario.length,
        rho_max,
        config.epsilon,
        n_override=config.n_particles,
        dt_override=config.dt,
    )
    for message in choice.warnings:
        logger.warning("%s: %s", scenario.name, message)
    return choice
