"""Run configuration: pydantic models, INI round trip and environment defaults."""

import configparser
import io
import os
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import ConfigValidationError
from src.wavefunctions import REFERENCE_RUNS, Scenario, TimeGrid, build_scenario

DEFAULT_EPSILON = 1e-3
DEFAULT_SEED = 20080101

Command = Literal["generate", "oracle", "compare", "sweep", "sample-test"]


class SamplerConfig(BaseModel):
    """Monte Carlo parameters for one density-sampling run."""

    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64, description="Master seed (64-bit)")
    n_particles: int = Field(ge=2, description="Ensemble size N")
    dt: float = Field(gt=0.0, description="Time step")
    epsilon: float = Field(
        default=DEFAULT_EPSILON, gt=0.0, lt=1.0, description="Small speed scale of the N*dt rule"
    )
    proposal: Literal["uniform"] = "uniform"


class RunConfig(BaseModel):
    """Everything a CLI command needs; flags override values read from a config file."""

    model_config = ConfigDict(extra="forbid")

    scenario: str = Field(default="harmonic")
    constants: dict[str, float] = Field(default_factory=dict)
    x_lo: Optional[float] = None
    x_hi: Optional[float] = None
    t0: Optional[float] = None
    t1: Optional[float] = None

    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    n_particles: Optional[int] = Field(default=None, ge=1)
    dt: Optional[float] = Field(default=None, gt=0.0)
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0.0, lt=1.0)

    quantiles: list[float] = Field(default_factory=list)
    x0: list[float] = Field(default_factory=list)
    solver: Literal["quantile", "guidance"] = "quantile"
    n_list: list[int] = Field(default_factory=list)
    dt_list: list[float] = Field(default_factory=list)
    seeds: list[int] = Field(default_factory=list)
    times: list[float] = Field(default_factory=list)
    workers: int = Field(default=1, ge=1)
    out: Optional[str] = None

    @field_validator("quantiles")
    @classmethod
    def _quantiles_open_interval(cls, values: list[float]) -> list[float]:
        for p in values:
            if not 0.0 < p < 1.0:
                raise ValueError(f"quantile {p} outside (0, 1)")
        return values

    @field_validator("n_list")
    @classmethod
    def _n_list_positive(cls, values: list[int]) -> list[int]:
        if any(n < 2 for n in values):
            raise ValueError("every sweep N must be >= 2")
        return values

    @field_validator("dt_list")
    @classmethod
    def _dt_list_positive(cls, values: list[float]) -> list[float]:
        if any(dt <= 0 for dt in values):
            raise ValueError("every sweep dt must be positive")
        return values

    @model_validator(mode="after")
    def _output_writable(self) -> "RunConfig":
        if self.out is not None:
            parent = Path(self.out).expanduser().resolve().parent
            if parent.exists() and not os.access(parent, os.W_OK):
                raise ValueError(f"output directory {parent} is not writable")
        return self

    def _overrides(self) -> dict[str, float]:
        overrides = dict(self.constants)
        for key in ("x_lo", "x_hi", "t0", "t1"):
            value = getattr(self, key)
            if value is not None:
                overrides[key] = value
        return overrides

    def build_scenario(self) -> Scenario:
        return build_scenario(self.scenario, **self._overrides())

    def resolved_dt(self) -> float:
        if self.dt is not None:
            return self.dt
        run = REFERENCE_RUNS.get(self.scenario)
        if run is None:
            raise ConfigValidationError(f"no default dt for scenario '{self.scenario}'; pass --dt")
        return run.dt

    def time_grid(self, scenario: Scenario, dt: Optional[float] = None) -> TimeGrid:
        t0, t1 = scenario.t_range
        return TimeGrid.from_range(t0, t1, dt if dt is not None else self.resolved_dt())

    def sampler_config(self, n_particles: int, dt: Optional[float] = None) -> SamplerConfig:
        return SamplerConfig(
            seed=self.seed,
            n_particles=n_particles,
            dt=dt if dt is not None else self.resolved_dt(),
            epsilon=self.epsilon,
        )

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        """Parse a ``[run]`` section plus an optional section named after the scenario."""
        parser = configparser.ConfigParser()
        parser.read_string(text)
        if not parser.has_section("run"):
            raise ConfigValidationError("config file needs a [run] section")
        values: dict[str, object] = {}
        for key, raw in parser.items("run"):
            values[key] = _parse_value(key, raw)
        scenario = str(values.get("scenario", "harmonic"))
        if parser.has_section(scenario):
            constants: dict[str, float] = {}
            for key, raw in parser.items(scenario):
                if key in ("x_lo", "x_hi", "t0", "t1"):
                    values[key] = float(raw)
                else:
                    constants[key] = float(raw)
            values["constants"] = constants
        return cls.model_validate(values)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        return cls.from_ini(Path(path).read_text())

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        run: dict[str, str] = {}
        for key in _RUN_KEYS:
            value = getattr(self, key)
            if value is None or value == []:
                continue
            run[key] = _format_value(value)
        parser["run"] = run
        section: dict[str, str] = {k: repr(float(v)) for k, v in sorted(self.constants.items())}
        for key in ("x_lo", "x_hi", "t0", "t1"):
            value = getattr(self, key)
            if value is not None:
                section[key] = repr(float(value))
        if section:
            parser[self.scenario] = section
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()


_RUN_KEYS = (
    "scenario",
    "seed",
    "n_particles",
    "dt",
    "epsilon",
    "quantiles",
    "x0",
    "solver",
    "n_list",
    "dt_list",
    "seeds",
    "times",
    "workers",
    "out",
)
_LIST_KEYS = {"quantiles": float, "x0": float, "n_list": int, "dt_list": float, "seeds": int, "times": float}


def _parse_value(key: str, raw: str) -> object:
    if key in _LIST_KEYS:
        cast = _LIST_KEYS[key]
        return [cast(item) for item in raw.replace(" ", "").split(",") if item]
    return raw


def _format_value(value: object) -> str:
    if isinstance(value, list):
        return ",".join(repr(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def env_log_level() -> str:
    return os.getenv("BOHM_DS_LOG_LEVEL", "INFO").upper()


def env_out_dir() -> Path:
    return Path(os.getenv("BOHM_DS_OUT_DIR", "."))
