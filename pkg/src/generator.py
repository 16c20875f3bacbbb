"""Density-sampling trajectory generator.

At every grid time t_n, N points are drawn from rho(., t_n) and sorted; trajectory i is
the i-th smallest point of every step. Nothing is differentiated or integrated. The
separable driver applies the same construction to each coordinate of a product
wavefunction and binds particles to per-coordinate ranks through the initial CPFs.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.config import SamplerConfig
from src.errors import ConfigValidationError, UnsupportedOperationError
from src.oracles import cpf
from src.sampling import check_config, sample_density, step_stream
from src.wavefunctions import Scenario, TimeGrid, estimate_rho_max

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnsembleMeta:
    scenario_name: str
    seed: int
    n_particles: int
    dt: float
    domain: tuple[float, float]
    rho_bound: float
    accepted_fractions: tuple[float, ...] = ()

    @property
    def domain_width(self) -> float:
        return self.domain[1] - self.domain[0]


@dataclass(frozen=True)
class Trajectory:
    """One path on a grid; ``label`` is its nominal quantile when it comes from an ensemble."""

    grid: TimeGrid
    positions: np.ndarray
    label: float
    index: Optional[int] = None
    n_particles: Optional[int] = None
    domain_width: Optional[float] = None


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """positions[i, n] is trajectory i at grid time t_n, sorted in i at every n."""

    grid: TimeGrid
    positions: np.ndarray
    meta: EnsembleMeta

    @property
    def n_particles(self) -> int:
        return int(self.positions.shape[0])

    @property
    def nominal_quantiles(self) -> np.ndarray:
        return (np.arange(self.n_particles) + 0.5) / self.n_particles

    def slice(self, n: int) -> np.ndarray:
        return self.positions[:, n]

    def trajectory(self, i: int) -> Trajectory:
        return Trajectory(
            grid=self.grid,
            positions=self.positions[i],
            label=(i + 0.5) / self.n_particles,
            index=i,
            n_particles=self.n_particles,
            domain_width=self.meta.domain_width,
        )

    def assert_non_crossing(self) -> None:
        gaps = np.diff(self.positions, axis=0)
        if gaps.size and float(gaps.min()) < 0.0:
            raise AssertionError("ensemble trajectories cross")


@dataclass(frozen=True)
class TrajectorySubset:
    grid: TimeGrid
    indices: tuple[int, ...]
    quantiles: tuple[float, ...]
    positions: np.ndarray
    n_particles: int
    domain_width: float

    def __len__(self) -> int:
        return len(self.indices)

    def __getitem__(self, k: int) -> Trajectory:
        return Trajectory(
            grid=self.grid,
            positions=self.positions[k],
            label=self.quantiles[k],
            index=self.indices[k],
            n_particles=self.n_particles,
            domain_width=self.domain_width,
        )

    def __iter__(self):
        return (self[k] for k in range(len(self)))


@dataclass(frozen=True)
class MultiTrajectorySet:
    """Per-coordinate ensembles plus, for each particle, its rank in every coordinate."""

    ensembles: tuple[TrajectoryEnsemble, ...]
    bindings: tuple[tuple[int, ...], ...]
    quantiles: tuple[tuple[float, ...], ...] = field(default=())

    @property
    def grid(self) -> TimeGrid:
        return self.ensembles[0].grid

    @property
    def dimensions(self) -> int:
        return len(self.ensembles)

    def particle_path(self, j: int) -> np.ndarray:
        """Shape (steps + 1, dimensions) path of particle j."""
        ranks = self.bindings[j]
        return np.stack(
            [ensemble.positions[rank] for ensemble, rank in zip(self.ensembles, ranks)], axis=1
        )

    def coordinate_trajectory(self, j: int, axis: int) -> Trajectory:
        return self.ensembles[axis].trajectory(self.bindings[j][axis])


def rank_for_quantile(p: float, n: int) -> int:
    """Midpoint rank rule i = round(P N - 1/2), ties to the lower rank, clamped to [0, N-1]."""
    return min(max(math.ceil(p * n - 1.0 - 1e-9), 0), n - 1)


def generate_ensemble(
    scenario: Scenario,
    grid: TimeGrid,
    config: SamplerConfig,
    rho_bound: Optional[float] = None,
    workers: int = 1,
) -> TrajectoryEnsemble:
    if not math.isclose(config.dt, grid.dt, rel_tol=1e-12):
        raise ConfigValidationError(f"sampler dt={config.dt} differs from grid dt={grid.dt}")
    bound = rho_bound if rho_bound is not None else estimate_rho_max(
        scenario, t_range=(grid.t0, grid.t1)
    )
    check_config(scenario, config, bound)
    n = config.n_particles
    times = grid.times

    def draw(step: int) -> tuple[np.ndarray, float]:
        batch = sample_density(scenario, float(times[step]), bound, n, step_stream(config.seed, step))
        order = np.argsort(batch.values, kind="stable")
        return batch.values[order], batch.accepted_fraction

    steps = range(grid.steps + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(draw, steps))
    else:
        results = [draw(step) for step in steps]

    positions = np.empty((n, grid.steps + 1))
    for step, (values, _) in enumerate(results):
        positions[:, step] = values
    fractions = tuple(fraction for _, fraction in results)
    logger.info(
        "%s: %d trajectories x %d steps, mean acceptance %.4f",
        scenario.name,
        n,
        grid.steps + 1,
        float(np.mean(fractions)),
    )
    ensemble = TrajectoryEnsemble(
        grid=grid,
        positions=positions,
        meta=EnsembleMeta(
            scenario_name=scenario.name,
            seed=config.seed,
            n_particles=n,
            dt=grid.dt,
            domain=scenario.domain,
            rho_bound=bound,
            accepted_fractions=fractions,
        ),
    )
    ensemble.assert_non_crossing()
    return ensemble


def select_by_quantile(ensemble: TrajectoryEnsemble, quantiles: Sequence[float]) -> TrajectorySubset:
    n = ensemble.n_particles
    if n == 0:
        raise ConfigValidationError("ensemble is empty")
    for p in quantiles:
        if not 0.0 < p < 1.0:
            raise ConfigValidationError(f"quantile {p} outside (0, 1)")
    indices = tuple(rank_for_quantile(p, n) for p in quantiles)
    return TrajectorySubset(
        grid=ensemble.grid,
        indices=indices,
        quantiles=tuple(float(p) for p in quantiles),
        positions=ensemble.positions[list(indices)],
        n_particles=n,
        domain_width=ensemble.meta.domain_width,
    )


def coordinate_seed(seed: int, axis: int) -> int:
    sequence = np.random.SeedSequence(seed, spawn_key=(0xC00D, axis))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def generate_separable(
    marginals: Sequence[Scenario],
    grid: TimeGrid,
    config: SamplerConfig,
    initial_points: Sequence[Sequence[float]],
    seeds: Optional[Sequence[int]] = None,
    workers: int = 1,
) -> MultiTrajectorySet:
    """Run the 1D method independently per coordinate of a separable wavefunction."""
    if isinstance(marginals, Scenario) or not isinstance(marginals, (list, tuple)):
        raise UnsupportedOperationError(
            "the separable driver needs one 1D marginal per coordinate; a joint density "
            "has no natural ordering to sort"
        )
    if not marginals:
        raise ConfigValidationError("at least one marginal is required")
    dims = len(marginals)
    if seeds is None:
        seeds = [coordinate_seed(config.seed, axis) for axis in range(dims)]
    if len(seeds) != dims:
        raise ConfigValidationError(f"expected {dims} coordinate seeds, got {len(seeds)}")

    for point in initial_points:
        if len(point) != dims:
            raise ConfigValidationError(f"initial point {tuple(point)} is not {dims}-dimensional")
        for value, marginal in zip(point, marginals):
            if not marginal.domain[0] <= value <= marginal.domain[1]:
                raise ConfigValidationError(
                    f"initial coordinate {value} outside {marginal.name} domain {marginal.domain}"
                )

    ensembles = tuple(
        generate_ensemble(marginal, grid, config.model_copy(update={"seed": int(seed)}), workers=workers)
        for marginal, seed in zip(marginals, seeds)
    )
    quantiles: list[tuple[float, ...]] = []
    bindings: list[tuple[int, ...]] = []
    for point in initial_points:
        ps = tuple(float(cpf(marginal, value, grid.t0)) for marginal, value in zip(marginals, point))
        quantiles.append(ps)
        bindings.append(
            tuple(rank_for_quantile(p, ensemble.n_particles) for p, ensemble in zip(ps, ensembles))
        )
    return MultiTrajectorySet(ensembles=ensembles, bindings=tuple(bindings), quantiles=tuple(quantiles))


def ensemble_width(ensemble: TrajectoryEnsemble) -> np.ndarray:
    """Standard deviation across trajectories at each grid time."""
    return ensemble.positions.std(axis=0)
