import math

import numpy as np
import pytest
from scipy import stats

from src import oracles
from src.cpf_store import get_store
from src.errors import (
    NodeEncounterError,
    NodeRegionError,
    QuantileBoundaryError,
    UnsupportedOperationError,
)
from src.oracles import (
    OracleTolerances,
    Solver,
    cpf,
    guidance_oracles,
    guidance_trajectory,
    invert_cpf,
    quantile_oracles,
    quantile_trajectory,
)
from src.wavefunctions import TimeGrid, build_scenario, eval_rho


@pytest.fixture
def free():
    return build_scenario("free")


def test_cpf_of_even_density_at_centre(free):
    """Test half the mass lies left of the centre of a symmetric packet."""
    for t in (0.0, 1.0, 3.0):
        assert cpf(free, 0.0, t) == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("name", ["harmonic", "free", "two-slit", "square-well", "uniform", "diffusion"])
def test_cpf_reaches_one_at_upper_edge(name):
    """Test the renormalised CPF is exactly 1 at x_hi and 0 at x_lo."""
    scenario = build_scenario(name)
    t = scenario.t_range[0]
    assert cpf(scenario, scenario.domain[1], t) == 1.0
    assert cpf(scenario, scenario.domain[0], t) == 0.0
    assert cpf(scenario, scenario.domain[1] + 10.0, t) == 1.0
    assert cpf(scenario, scenario.domain[0] - 10.0, t) == 0.0


def test_square_well_cpf_at_centre():
    """Test CPF(1/2, 0) = 1/2 + 4/(3 pi)."""
    well = build_scenario("square-well")
    assert cpf(well, 0.5, 0.0) == pytest.approx(0.5 + 4.0 / (3.0 * math.pi), abs=1e-6)


@pytest.mark.parametrize("name", ["harmonic", "two-slit", "square-well"])
def test_cpf_is_monotone(name):
    """Test x1 <= x2 implies CPF(x1) <= CPF(x2)."""
    scenario = build_scenario(name)
    rng = np.random.default_rng(17)
    t = float(np.mean(scenario.t_range))
    pairs = np.sort(rng.uniform(*scenario.domain, size=(500, 2)), axis=1)
    assert np.all(cpf(scenario, pairs[:, 0], t) <= cpf(scenario, pairs[:, 1], t))


def test_invert_free_median_and_two_sigma(free):
    """Test standard normal quantiles of the t=0 packet."""
    assert invert_cpf(free, 0.5, 0.0) == pytest.approx(0.0, abs=1e-8)
    assert free.sigma0 == pytest.approx(0.39894, abs=1e-5)
    assert invert_cpf(free, 0.97725, 0.0) == pytest.approx(2.0 * free.sigma0, abs=2e-4)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1])
def test_invert_rejects_boundary_quantiles(free, p):
    """Test P outside the open interval raises a boundary error."""
    with pytest.raises(QuantileBoundaryError):
        invert_cpf(free, p, 0.0)


@pytest.mark.parametrize("name,t", [("harmonic", 0.7), ("free", 2.0), ("two-slit", 50.0), ("square-well", 0.4)])
def test_invert_round_trip(name, t):
    """Test invert_cpf(cpf(x)) = x to 1e-8 L where rho > 1e-6."""
    scenario = build_scenario(name)
    rng = np.random.default_rng(23)
    xs = rng.uniform(*scenario.domain, size=2000)
    xs = xs[eval_rho(scenario, xs, t) > 1e-6][:100]
    ps = cpf(scenario, xs, t)
    back = np.array([invert_cpf(scenario, float(p), t) for p in ps])
    np.testing.assert_allclose(back, xs, rtol=0.0, atol=1e-8 * scenario.length)


def test_free_quantile_trajectory_scaling(free):
    """Test x_P(t) = x_P(0) sqrt(1 + beta^2 t^2)."""
    grid = TimeGrid.from_range(0.0, 3.0, 0.15)
    median = quantile_trajectory(free, 0.5, grid)
    np.testing.assert_allclose(median.positions, 0.0, atol=1e-8)

    upper = quantile_trajectory(free, 0.8413, grid)
    expected = free.sigma0 * stats.norm.ppf(0.8413) * np.sqrt(1.0 + (math.pi * grid.times) ** 2)
    np.testing.assert_allclose(upper.positions, expected, rtol=2e-4)
    assert upper.positions[-1] == pytest.approx(3.781, abs=2e-3)
    assert upper.solver == Solver.QUANTILE
    assert upper.p == 0.8413
    assert upper.densities.shape == upper.positions.shape


def test_eigenstate_quantile_trajectory_is_constant():
    """Test a stationary density fixes every quantile."""
    eigenstate = build_scenario("eigenstate")
    grid = TimeGrid.from_range(0.0, 3.0, 0.1)
    trajectory = quantile_trajectory(eigenstate, 0.3, grid)
    np.testing.assert_allclose(trajectory.positions, trajectory.positions[0], atol=1e-9)


def test_quantile_trajectories_never_cross():
    """Test P1 < P2 keeps x_P1(t) <= x_P2(t)."""
    harmonic = build_scenario("harmonic")
    grid = TimeGrid.from_range(0.0, 3.0, 0.1)
    paths = quantile_oracles(harmonic, [0.1, 0.3, 0.5, 0.7, 0.9], grid)
    stacked = np.stack([path.positions for path in paths])
    assert np.all(np.diff(stacked, axis=0) >= 0.0)


def test_harmonic_quantile_trajectory_is_periodic():
    """Test x_P(t + 2 pi / omega) = x_P(t)."""
    harmonic = build_scenario("harmonic")
    grid = TimeGrid(t0=0.0, dt=harmonic.period / 20, steps=40)
    path = quantile_trajectory(harmonic, 0.4, grid).positions
    np.testing.assert_allclose(path[20:], path[:21], atol=1e-8)


def test_harmonic_guidance_is_periodic():
    """Test x(t + 2 pi / omega) = x(t) for guidance, tight with fine substeps."""
    harmonic = build_scenario("harmonic")
    grid = TimeGrid(t0=0.0, dt=harmonic.period / 20, steps=40)
    x0 = float(quantile_trajectory(harmonic, 0.3, grid).positions[0])

    fine = OracleTolerances(rk4_substeps=100)
    path = guidance_trajectory(harmonic, x0, grid, fine).positions
    np.testing.assert_allclose(path[20:], path[:21], atol=1e-6)
    reference = quantile_trajectory(harmonic, 0.3, grid, fine).positions
    assert np.max(np.abs(path - reference)) < 1e-4

    coarse = guidance_trajectory(harmonic, x0, grid).positions
    assert np.max(np.abs(coarse[20:] - coarse[:21])) < 3e-2


def test_eigenstate_guidance_is_stationary():
    """Test zero velocity keeps x(t) = x0."""
    eigenstate = build_scenario("eigenstate")
    grid = TimeGrid.from_range(0.0, 3.0, 0.1)
    trajectory = guidance_trajectory(eigenstate, 0.3, grid)
    np.testing.assert_allclose(trajectory.positions, 0.3, atol=1e-12)
    assert trajectory.solver == Solver.GUIDANCE
    assert trajectory.x0 == 0.3
    assert trajectory.p is None


def test_free_guidance_matches_closed_form(free):
    """Test RK4 against x(t) = x0 sqrt(1 + beta^2 t^2)."""
    grid = TimeGrid.from_range(0.0, 3.0, 0.15)
    trajectory = guidance_trajectory(free, free.sigma0, grid)
    expected = free.sigma0 * np.sqrt(1.0 + (math.pi * grid.times) ** 2)
    np.testing.assert_allclose(trajectory.positions, expected, rtol=1e-6)


def test_free_guidance_agrees_with_quantile(free):
    """Test both oracles give the same trajectory from the same start."""
    grid = TimeGrid.from_range(0.0, 3.0, 0.15)
    p = float(cpf(free, free.sigma0, 0.0))
    by_quantile = quantile_trajectory(free, p, grid)
    (by_guidance,) = guidance_oracles(free, [float(by_quantile.positions[0])], grid)
    assert np.max(np.abs(by_guidance.positions - by_quantile.positions)) < 1e-3


def test_guidance_constant_left_probability(free):
    """Test CPF(x(t), t) is conserved along a guidance trajectory."""
    grid = TimeGrid.from_range(0.0, 3.0, 0.15)
    trajectory = guidance_trajectory(free, -0.6, grid)
    left = np.array([float(cpf(free, x, t)) for x, t in zip(trajectory.positions, grid.times)])
    assert np.ptp(left) < 5e-4


def test_guidance_start_at_node():
    """Test launching on a wall node reports no good step."""
    well = build_scenario("square-well")
    grid = TimeGrid.from_range(0.0, 1.0, 0.05)
    with pytest.raises(NodeEncounterError) as info:
        guidance_trajectory(well, 0.0, grid)
    assert info.value.last_good_step == -1
    assert info.value.last_good_position is None
    assert "node encounter" in info.value.diagnostics()


def test_guidance_node_mid_run(monkeypatch, free):
    """Test a node hit mid-run reports the last completed grid step."""
    real_velocity = oracles.eval_velocity

    def velocity_with_node(scenario, x, t, floor):
        if t > 0.5:
            raise NodeRegionError(x, t, 0.0, floor)
        return real_velocity(scenario, x, t, floor=floor)

    monkeypatch.setattr(oracles, "eval_velocity", velocity_with_node)
    grid = TimeGrid.from_range(0.0, 1.5, 0.15)
    with pytest.raises(NodeEncounterError) as info:
        guidance_trajectory(free, 0.4, grid)
    assert info.value.last_good_step == 3
    assert info.value.last_good_position == pytest.approx(0.4 * math.sqrt(1 + (math.pi * 0.45) ** 2), rel=1e-6)


def test_guidance_needs_wavefunction():
    """Test density-only scenarios have no guidance law."""
    diffusion = build_scenario("diffusion")
    grid = TimeGrid.from_range(0.0, 1.0, 0.1)
    with pytest.raises(UnsupportedOperationError):
        guidance_trajectory(diffusion, 0.0, grid)


def test_diffusion_quantiles_follow_heat_kernel():
    """Test quantile motion of a non-quantum spreading density."""
    diffusion = build_scenario("diffusion")
    grid = TimeGrid.from_range(0.0, 3.0, 0.5)
    path = quantile_trajectory(diffusion, 0.75, grid)
    expected = path.positions[0] * np.sqrt(1.0 + 2 * 0.5 * grid.times / 1.0)
    np.testing.assert_allclose(path.positions, expected, rtol=1e-5)


def test_quantile_oracles_prewarm_store():
    """Test batch oracles build each time slice once."""
    store = get_store()
    store.clear()
    harmonic = build_scenario("harmonic")
    grid = TimeGrid.from_range(0.0, 1.0, 0.1)
    quantile_oracles(harmonic, [0.25, 0.75], grid)
    stats_after = store.get_stats()
    assert stats_after["misses"] == grid.steps + 1
    assert stats_after["hits"] >= 2 * (grid.steps + 1)
