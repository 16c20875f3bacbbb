"""Named scenario catalog with the published run parameters as defaults."""

import math
from dataclasses import dataclass
from typing import Callable

from src.errors import ConfigValidationError, UnknownScenarioError
from src.wavefunctions.base import Scenario, pack_constants
from src.wavefunctions.densities import DiffusingGaussian, UniformDensity
from src.wavefunctions.gaussian import FreeGaussian, TwoSlitGaussians
from src.wavefunctions.harmonic import HarmonicEigenstate, HarmonicSuperposition
from src.wavefunctions.well import SquareWellMode

TWO_SLIT_HALF_WIDTH = 129.668


@dataclass(frozen=True)
class ReferenceRun:
    """Time step and ensemble size used for a catalog scenario's reference run."""

    dt: float
    n_particles: int


def harmonic(
    hbar: float = 1.0,
    m: float = 1.0,
    omega: float = 3.0,
    x_lo: float = -5.0,
    x_hi: float = 5.0,
    t0: float = 0.0,
    t1: float = 3.0,
) -> HarmonicSuperposition:
    return HarmonicSuperposition(
        name="harmonic",
        constants=pack_constants(hbar=hbar, m=m, omega=omega),
        domain=(x_lo, x_hi),
        t_range=(t0, t1),
    )


def eigenstate(
    hbar: float = 1.0,
    m: float = 1.0,
    omega: float = 3.0,
    x_lo: float = -5.0,
    x_hi: float = 5.0,
    t0: float = 0.0,
    t1: float = 3.0,
) -> HarmonicEigenstate:
    return HarmonicEigenstate(
        name="eigenstate",
        constants=pack_constants(hbar=hbar, m=m, omega=omega),
        domain=(x_lo, x_hi),
        t_range=(t0, t1),
    )


def free(
    hbar: float = 1.0,
    m: float = 1.0,
    a: float = math.pi / 2,
    x_lo: float = -25.0,
    x_hi: float = 25.0,
    t0: float = 0.0,
    t1: float = 3.0,
) -> FreeGaussian:
    return FreeGaussian(
        name="free",
        constants=pack_constants(hbar=hbar, m=m, a=a),
        domain=(x_lo, x_hi),
        t_range=(t0, t1),
    )


def two_slit(
    hbar: float = 1.0,
    m: float = 1.0,
    slit_offset: float = 10.0,
    slit_width: float = 2.5,
    emit_length_scale: float = 1.0,
    emit_time_scale: float = 1.0,
    x_lo: float = -TWO_SLIT_HALF_WIDTH,
    x_hi: float = TWO_SLIT_HALF_WIDTH,
    t0: float = 0.0,
    t1: float = 100.0,
) -> TwoSlitGaussians:
    return TwoSlitGaussians(
        name="two-slit",
        constants=pack_constants(
            hbar=hbar,
            m=m,
            slit_offset=slit_offset,
            slit_width=slit_width,
            emit_length_scale=emit_length_scale,
            emit_time_scale=emit_time_scale,
        ),
        domain=(x_lo, x_hi),
        t_range=(t0, t1),
    )


def square_well(
    hbar: float = 1.0,
    m: float = 1.0,
    width: float = 1.0,
    t0: float = 0.0,
    t1: float = 1.0,
    name: str = "square-well",
) -> SquareWellMode:
    return SquareWellMode(
        name=name,
        constants=pack_constants(hbar=hbar, m=m, width=width),
        domain=(0.0, width),
        t_range=(t0, t1),
    )


def square_well_2d(**overrides: float) -> tuple[SquareWellMode, SquareWellMode]:
    """x and y factors of the separable well psi(x, y, t) = psi_x(x, t) psi_y(y, t)."""
    return (
        square_well(name="square-well", **overrides),
        square_well(name="square-well-y", **overrides),
    )


def uniform(x_lo: float = 0.0, x_hi: float = 1.0, t0: float = 0.0, t1: float = 1.0) -> UniformDensity:
    return UniformDensity(name="uniform", constants=(), domain=(x_lo, x_hi), t_range=(t0, t1))


def diffusion(
    sigma0: float = 1.0,
    diffusivity: float = 0.5,
    x_lo: float = -12.0,
    x_hi: float = 12.0,
    t0: float = 0.0,
    t1: float = 3.0,
) -> DiffusingGaussian:
    return DiffusingGaussian(
        name="diffusion",
        constants=pack_constants(sigma0=sigma0, diffusivity=diffusivity),
        domain=(x_lo, x_hi),
        t_range=(t0, t1),
    )


SCENARIO_REGISTRY: dict[str, Callable[..., Scenario]] = {
    "harmonic": harmonic,
    "free": free,
    "two-slit": two_slit,
    "square-well": square_well,
    "eigenstate": eigenstate,
    "uniform": uniform,
    "diffusion": diffusion,
}

REFERENCE_RUNS: dict[str, ReferenceRun] = {
    "harmonic": ReferenceRun(dt=0.1, n_particles=10_000),
    "free": ReferenceRun(dt=0.15, n_particles=100_000),
    "two-slit": ReferenceRun(dt=100.0 / 30.0, n_particles=100_000),
    "square-well": ReferenceRun(dt=0.05, n_particles=10_000),
}


def list_scenarios() -> list[str]:
    return sorted(SCENARIO_REGISTRY)


def build_scenario(name: str, **overrides: float) -> Scenario:
    factory = SCENARIO_REGISTRY.get(name)
    if factory is None:
        raise UnknownScenarioError(name, list_scenarios())
    try:
        return factory(**{key: float(value) for key, value in overrides.items()})
    except TypeError as exc:
        raise ConfigValidationError(f"{name}: {exc}") from exc
