"""CSV emission and parsing for ensembles, oracles, comparisons and sweeps.

Floats are written with 17 significant digits so every double survives a round trip.
Each output file gets a ``<out>.meta`` sidecar of ``key = value`` lines.
"""

import csv
import logging
import platform
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy

from src.errors import ConfigValidationError
from src.generator import TrajectoryEnsemble, TrajectorySubset
from src.metrics import ErrorReport, SampleTestReport, SweepReport, SweepRow
from src.oracles import OracleTrajectory, Solver
from src.wavefunctions import Scenario

logger = logging.getLogger(__name__)

ENSEMBLE_PREFIX = "traj_"
COMPARE_HEADER = ["P", "index", "sup_error", "rms_error", "max_step_change", "step_change_bound"]
SWEEP_HEADER = ["scenario", "N", "dt", "seed", "P", "sup_error", "rms_error", "status"]
SAMPLE_TEST_HEADER = [
    "seed",
    "t",
    "n",
    "ks_statistic",
    "critical_value",
    "passed",
    "accepted_fraction",
]


def fmt(value: float | None) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def emission_scales(scenario: Scenario) -> tuple[float, float]:
    """(length, time) factors applied on output; 1.0 unless the scenario defines them."""
    params = scenario.params
    return params.get("emit_length_scale", 1.0), params.get("emit_time_scale", 1.0)


@dataclass(frozen=True)
class EnsembleTable:
    times: np.ndarray
    indices: tuple[int, ...]
    positions: np.ndarray


@dataclass(frozen=True)
class OracleTable:
    times: np.ndarray
    solver: Solver
    labels: tuple[float, ...]
    positions: np.ndarray


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("wrote %s", path)
    return path


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigValidationError(f"{path} is empty") from None
        return header, [row for row in reader if row]


def write_ensemble_csv(
    path: Path,
    trajectories: TrajectoryEnsemble | TrajectorySubset,
    length_scale: float = 1.0,
    time_scale: float = 1.0,
) -> Path:
    """One row per grid time, one ``traj_<i>`` column per trajectory."""
    if isinstance(trajectories, TrajectoryEnsemble):
        indices: Sequence[int] = range(trajectories.n_particles)
    else:
        indices = trajectories.indices
    positions = trajectories.positions * length_scale
    times = trajectories.grid.times * time_scale
    header = ["t"] + [f"{ENSEMBLE_PREFIX}{i}" for i in indices]
    rows = (
        [fmt(t)] + [fmt(x) for x in positions[:, n]] for n, t in enumerate(times)
    )
    return _write_rows(path, header, rows)


def read_ensemble_csv(path: Path) -> EnsembleTable:
    header, rows = _read_rows(Path(path))
    if not header or header[0] != "t" or not all(h.startswith(ENSEMBLE_PREFIX) for h in header[1:]):
        raise ConfigValidationError(f"{path} is not an ensemble CSV")
    data = np.array([[float(v) for v in row] for row in rows], dtype=float)
    return EnsembleTable(
        times=data[:, 0],
        indices=tuple(int(h[len(ENSEMBLE_PREFIX):]) for h in header[1:]),
        positions=data[:, 1:].T.copy(),
    )


def write_oracle_csv(
    path: Path,
    oracles: Sequence[OracleTrajectory],
    length_scale: float = 1.0,
    time_scale: float = 1.0,
) -> Path:
    if not oracles:
        raise ConfigValidationError("no oracle trajectories to write")
    solver = oracles[0].solver
    if any(o.solver != solver or o.grid != oracles[0].grid for o in oracles):
        raise ConfigValidationError("oracle CSV needs one solver and one grid")
    prefix = "P=" if solver == Solver.QUANTILE else "x0="
    header = ["t", "solver"] + [f"{prefix}{o.label!r}" for o in oracles]
    times = oracles[0].grid.times * time_scale
    rows = (
        [fmt(t), solver.value] + [fmt(o.positions[n] * length_scale) for o in oracles]
        for n, t in enumerate(times)
    )
    return _write_rows(path, header, rows)


def read_oracle_csv(path: Path) -> OracleTable:
    header, rows = _read_rows(Path(path))
    if header[:2] != ["t", "solver"]:
        raise ConfigValidationError(f"{path} is not an oracle CSV")
    labels = tuple(float(h.split("=", 1)[1]) for h in header[2:])
    solver = Solver(rows[0][1]) if rows else Solver.QUANTILE
    times = np.array([float(row[0]) for row in rows])
    positions = np.array([[float(v) for v in row[2:]] for row in rows], dtype=float)
    return OracleTable(times=times, solver=solver, labels=labels, positions=positions.T.copy())


def write_compare_csv(path: Path, reports: Sequence[ErrorReport]) -> Path:
    rows = (
        [
            fmt(r.label),
            "" if r.index is None else str(r.index),
            fmt(r.sup_error),
            fmt(r.rms_error),
            fmt(r.max_step_change),
            fmt(r.step_change_bound),
        ]
        for r in reports
    )
    return _write_rows(path, COMPARE_HEADER, rows)


def write_sweep_csv(path: Path, report: SweepReport) -> Path:
    rows = (
        [row.scenario, str(row.n), fmt(row.dt), str(row.seed), fmt(row.p), fmt(row.sup_error), fmt(row.rms_error), row.status]
        for row in report.rows
    )
    return _write_rows(path, SWEEP_HEADER, rows)


def read_sweep_csv(path: Path) -> list[SweepRow]:
    header, rows = _read_rows(Path(path))
    if header != SWEEP_HEADER:
        raise ConfigValidationError(f"{path} is not a sweep CSV")
    return [
        SweepRow(
            scenario=row[0],
            n=int(row[1]),
            dt=float(row[2]),
            seed=int(row[3]),
            p=float(row[4]),
            sup_error=float(row[5]),
            rms_error=float(row[6]),
            status=row[7],
        )
        for row in rows
    ]


def write_sample_test_csv(path: Path, report: SampleTestReport) -> Path:
    rows = (
        [
            str(row.seed),
            fmt(row.t),
            str(row.n),
            fmt(row.ks_statistic),
            fmt(row.critical_value),
            str(row.passed).lower(),
            fmt(row.accepted_fraction),
        ]
        for row in report.rows
    )
    return _write_rows(path, SAMPLE_TEST_HEADER, rows)


def metadata_path(out: Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".meta")


def write_metadata(out: Path, entries: Mapping[str, object]) -> Path:
    path = metadata_path(out)
    versions = {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }
    lines = [f"{key} = {_meta_value(value)}" for key, value in entries.items()]
    lines += [f"version.{name} = {value}" for name, value in versions.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_metadata(out: Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    for line in metadata_path(out).read_text(encoding="utf-8").splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            entries[key] = value
    return entries


def _meta_value(value: object) -> str:
    if isinstance(value, float):
        return fmt(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_meta_value(v) for v in value)
    if isinstance(value, dict):
        return ",".join(f"{k}:{_meta_value(v)}" for k, v in sorted(value.items()))
    return str(value)
