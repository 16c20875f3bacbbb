"""N / dt convergence sweeps and multi-seed sampler checks."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from tqdm import tqdm

from src.config import DEFAULT_EPSILON, SamplerConfig
from src.errors import ConfigValidationError, DensitySamplingError
from src.generator import generate_ensemble, select_by_quantile
from src.metrics.errors import compare_trajectories, ks_critical_value, ks_statistic
from src.oracles import DEFAULT_TOLERANCES, OracleTolerances, cpf, quantile_oracles
from src.sampling import sample_density, step_stream
from src.wavefunctions import Scenario, TimeGrid, estimate_rho_max

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    n: int
    dt: float
    seed: int
    p: float
    sup_error: float
    rms_error: float
    status: str = STATUS_OK
    message: str = ""

    @property
    def key(self) -> tuple[int, float, int, float]:
        return (self.n, self.dt, self.seed, self.p)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass
class SweepReport:
    scenario: str
    t_range: tuple[float, float]
    rows: list[SweepRow] = field(default_factory=list)

    def ns(self) -> list[int]:
        return sorted({row.n for row in self.rows})

    def failed_rows(self) -> list[SweepRow]:
        return [row for row in self.rows if not row.ok]

    def median_rms(self, n: int, dt: Optional[float] = None, p: Optional[float] = None) -> float:
        values = [
            row.rms_error
            for row in self.rows
            if row.ok
            and row.n == n
            and (dt is None or row.dt == dt)
            and (p is None or row.p == p)
        ]
        return float(np.median(values)) if values else math.nan

    def failure_rate(self) -> float:
        return len(self.failed_rows()) / len(self.rows) if self.rows else 0.0

    def summary(self) -> dict:
        return {
            "scenario": self.scenario,
            "t_range": self.t_range,
            "rows": len(self.rows),
            "failed": len(self.failed_rows()),
            "median_rms": {n: self.median_rms(n) for n in self.ns()},
        }


def _sweep_cell(
    scenario: Scenario,
    n: int,
    dt: float,
    seed: int,
    quantiles: Sequence[float],
    bound: float,
    epsilon: float,
    tolerances: OracleTolerances,
) -> list[SweepRow]:
    try:
        t0, t1 = scenario.t_range
        grid = TimeGrid.from_range(t0, t1, dt)
        config = SamplerConfig(seed=seed, n_particles=n, dt=dt, epsilon=epsilon)
        ensemble = generate_ensemble(scenario, grid, config, rho_bound=bound)
        subset = select_by_quantile(ensemble, quantiles)
        oracles = quantile_oracles(scenario, quantiles, grid, tolerances)
        rows = []
        for trajectory, oracle in zip(subset, oracles):
            report = compare_trajectories(trajectory, oracle)
            rows.append(
                SweepRow(scenario.name, n, dt, seed, float(oracle.label), report.sup_error, report.rms_error)
            )
        return rows
    except (DensitySamplingError, ValueError) as exc:
        logger.warning("sweep cell N=%d dt=%g seed=%d failed: %s", n, dt, seed, exc)
        return [
            SweepRow(scenario.name, n, dt, seed, float(p), math.nan, math.nan, STATUS_FAILED, str(exc))
            for p in quantiles
        ]


def convergence_sweep(
    scenario: Scenario,
    n_list: Sequence[int],
    dt_list: Sequence[float],
    seeds: Sequence[int],
    quantiles: Sequence[float],
    epsilon: float = DEFAULT_EPSILON,
    rho_bound: Optional[float] = None,
    workers: int = 1,
    progress: bool = False,
    tolerances: OracleTolerances = DEFAULT_TOLERANCES,
) -> SweepReport:
    """Compare DS ensembles against the quantile oracle over the product of N, dt and seed.

    A cell that raises is recorded as failed rows and the sweep continues. Rows are
    returned sorted by (N, dt, seed, P) whatever order the cells finish in.
    """
    for label, values in (("N", n_list), ("dt", dt_list), ("seeds", seeds), ("quantiles", quantiles)):
        if not values:
            raise ConfigValidationError(f"sweep needs a nonempty {label} list")
    bound = rho_bound if rho_bound is not None else estimate_rho_max(scenario)
    cells = [(n, dt, seed) for n in n_list for dt in dt_list for seed in seeds]
    logger.info("sweeping %s over %d cells", scenario.name, len(cells))

    rows: list[SweepRow] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_sweep_cell, scenario, n, dt, seed, quantiles, bound, epsilon, tolerances)
            for n, dt, seed in cells
        ]
        for future in tqdm(as_completed(futures), total=len(futures), desc="sweep", disable=not progress):
            rows.extend(future.result())

    rows.sort(key=lambda row: row.key)
    report = SweepReport(scenario=scenario.name, t_range=scenario.t_range, rows=rows)
    if report.failed_rows():
        logger.warning("%d of %d sweep rows failed", len(report.failed_rows()), len(rows))
    return report


@dataclass(frozen=True)
class SampleTestRow:
    seed: int
    t: float
    n: int
    ks_statistic: float
    critical_value: float
    accepted_fraction: float

    @property
    def passed(self) -> bool:
        return self.ks_statistic < self.critical_value


@dataclass
class SampleTestReport:
    scenario: str
    alpha: float
    rows: list[SampleTestRow] = field(default_factory=list)

    @property
    def pass_rate(self) -> float:
        return sum(row.passed for row in self.rows) / len(self.rows) if self.rows else math.nan

    def pass_rates_by_time(self) -> dict[float, float]:
        """Fraction of seeds passing at each sampled time."""
        by_time: dict[float, list[bool]] = {}
        for row in self.rows:
            by_time.setdefault(row.t, []).append(row.passed)
        return {t: sum(passed) / len(passed) for t, passed in by_time.items()}


def sample_test(
    scenario: Scenario,
    times: Sequence[float],
    seeds: Sequence[int],
    n: int,
    alpha: float = 0.01,
    rho_bound: Optional[float] = None,
    progress: bool = False,
) -> SampleTestReport:
    """KS test of fresh rejection samples against the quadrature CPF for every (seed, t)."""
    if not times or not seeds:
        raise ConfigValidationError("sample test needs at least one time and one seed")
    bound = rho_bound if rho_bound is not None else estimate_rho_max(scenario)
    critical = ks_critical_value(n, alpha)
    report = SampleTestReport(scenario=scenario.name, alpha=alpha)
    for seed in tqdm(seeds, desc="sample-test", disable=not progress):
        for step, t in enumerate(times):
            batch = sample_density(scenario, float(t), bound, n, step_stream(seed, step))
            statistic = ks_statistic(batch, lambda x, t=float(t): cpf(scenario, x, t))
            report.rows.append(
                SampleTestRow(seed, float(t), n, statistic, critical, batch.accepted_fraction)
            )
    logger.info("%s: KS pass rate %.3f at alpha=%g", scenario.name, report.pass_rate, alpha)
    return report
