"""Trajectory error reports and goodness-of-fit statistics."""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

import numpy as np
from scipy import stats

from src.errors import ConfigValidationError, GridMismatchError
from src.sampling import SampleBatch
from src.wavefunctions import TimeGrid


class GriddedPath(Protocol):
    grid: TimeGrid
    positions: np.ndarray


@dataclass(frozen=True)
class ErrorReport:
    """Per-step |x_DS - x_oracle| with aggregates.

    ``normalized_errors`` multiplies each step's error by the oracle density there, the
    dimensionless quantity that must stay small for the ranks to track the CPF.
    """

    label: float
    per_step_errors: np.ndarray
    normalized_errors: np.ndarray
    oracle_densities: np.ndarray
    sup_error: float
    rms_error: float
    max_step_change: float
    step_change_bound: Optional[float] = None
    index: Optional[int] = None

    @property
    def steps(self) -> int:
        return int(self.per_step_errors.size)

    def normalized_percentile(self, q: float) -> float:
        if self.normalized_errors.size == 0:
            return math.nan
        return float(np.percentile(self.normalized_errors, q))


def compare_trajectories(ds: GriddedPath, oracle: GriddedPath) -> ErrorReport:
    if ds.grid != oracle.grid:
        raise GridMismatchError(f"cannot compare trajectories on {ds.grid!r} and {oracle.grid!r}")
    ds_positions = np.asarray(ds.positions, dtype=float)
    errors = np.abs(ds_positions - np.asarray(oracle.positions, dtype=float))
    densities = np.asarray(getattr(oracle, "densities", np.empty(0)), dtype=float)
    normalized = errors * densities if densities.size == errors.size else np.empty(0)

    steps = np.abs(np.diff(ds_positions))
    n_particles = getattr(ds, "n_particles", None)
    width = getattr(ds, "domain_width", None)
    bound = 2.0 * width / n_particles if n_particles and width else None
    return ErrorReport(
        label=float(getattr(ds, "label", getattr(oracle, "label", math.nan))),
        per_step_errors=errors,
        normalized_errors=normalized,
        oracle_densities=densities,
        sup_error=float(errors.max()),
        rms_error=float(np.sqrt(np.mean(errors**2))),
        max_step_change=float(steps.max()) if steps.size else 0.0,
        step_change_bound=bound,
        index=getattr(ds, "index", None),
    )


def quantile_noise(p: float, n: int, rho: np.ndarray | float) -> np.ndarray | float:
    """Standard deviation sqrt(P(1-P)/N) / rho of the rank-i order statistic about x_P."""
    return np.sqrt(p * (1.0 - p) / n) / np.asarray(rho, dtype=float)


def regional_contrast(reports: Sequence[ErrorReport]) -> tuple[float, float]:
    """Mean error where the oracle density is above / not above its median."""
    errors = np.concatenate([r.per_step_errors for r in reports if r.oracle_densities.size])
    densities = np.concatenate([r.oracle_densities for r in reports if r.oracle_densities.size])
    if errors.size == 0:
        raise ConfigValidationError("regional contrast needs reports with oracle densities")
    bright = densities > np.median(densities)
    if not bright.any() or bright.all():
        raise ConfigValidationError("oracle densities do not split into two regions")
    return float(errors[bright].mean()), float(errors[~bright].mean())


def ks_statistic(samples: SampleBatch | np.ndarray, reference: Callable[[np.ndarray], np.ndarray]) -> float:
    values = samples.values if isinstance(samples, SampleBatch) else np.asarray(samples, dtype=float)
    if values.size == 0:
        raise ConfigValidationError("KS statistic needs at least one sample")
    return float(stats.kstest(values, reference).statistic)


def ks_critical_value(n: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value, K_{1-alpha} / sqrt(n)."""
    if n < 1 or not 0.0 < alpha < 1.0:
        raise ConfigValidationError(f"invalid KS parameters n={n}, alpha={alpha}")
    return float(stats.kstwobign.isf(alpha) / math.sqrt(n))
