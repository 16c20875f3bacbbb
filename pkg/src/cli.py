import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from src.config import RunConfig, env_log_level, env_out_dir
from src.errors import (
    BoundViolationError,
    ConfigValidationError,
    NodeEncounterError,
    QuantileBoundaryError,
    SamplingStalledError,
    UnknownScenarioError,
    UnsupportedOperationError,
)
from src.generator import generate_ensemble, select_by_quantile
from src.metrics import compare_trajectories, convergence_sweep, sample_test
from src.oracles import DEFAULT_TOLERANCES, guidance_oracles, invert_cpf, quantile_oracles
from src.records import (
    emission_scales,
    write_compare_csv,
    write_ensemble_csv,
    write_metadata,
    write_oracle_csv,
    write_sample_test_csv,
    write_sweep_csv,
)
from src.sampling import PRNG_ID, choose_parameters
from src.wavefunctions import REFERENCE_RUNS, Scenario, estimate_rho_max, list_scenarios

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_NODE = 4

DEFAULT_QUANTILES = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
DEFAULT_SAMPLE_TEST_SEEDS = 10


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="INI run configuration file")
    common.add_argument(
        "--scenario", type=str, default=None, help=f"Scenario name ({', '.join(list_scenarios())})"
    )
    common.add_argument(
        "--const",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a scenario constant (repeatable)",
    )
    # Numeric flags stay strings; RunConfig coerces them so a bad number exits 3, not 2.
    common.add_argument("--seed", default=None, help="Master seed (64-bit integer)")
    common.add_argument("--epsilon", default=None, help="Speed scale of the N*dt rule")
    common.add_argument("--n", dest="n_particles", default=None, help="Ensemble size N")
    common.add_argument("--dt", default=None, help="Time step")
    common.add_argument("--t-range", nargs=2, default=None, metavar=("T0", "T1"))
    common.add_argument("--quantiles", nargs="+", default=None, help="Quantiles P in (0, 1)")
    common.add_argument("--x0", nargs="+", default=None, help="Guidance launch positions")
    common.add_argument("--solver", choices=["quantile", "guidance"], default=None)
    common.add_argument("--n-list", nargs="+", default=None, help="Sweep ensemble sizes")
    common.add_argument("--dt-list", nargs="+", default=None, help="Sweep time steps")
    common.add_argument("--seeds", nargs="+", default=None, help="Seeds for sweeps and KS tests")
    common.add_argument("--times", nargs="+", default=None, help="Sample-test times")
    common.add_argument("--workers", default=None, help="Worker threads")
    common.add_argument("--out", "-o", type=str, default=None, help="Output CSV path")
    common.add_argument("--progress", action="store_true", help="Show progress bars")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        prog="bohm-ds",
        description="Bohm trajectories by density sampling, with quantile and guidance oracles",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    commands.add_parser("generate", parents=[common], help="Sample a trajectory ensemble")
    commands.add_parser("oracle", parents=[common], help="Reference trajectories")
    commands.add_parser("compare", parents=[common], help="Ensemble vs quantile oracle errors")
    commands.add_parser("sweep", parents=[common], help="N / dt convergence sweep")
    commands.add_parser("sample-test", parents=[common], help="KS test of the sampler")
    return parser


def _parse_constants(items: Sequence[str]) -> dict[str, float]:
    constants: dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigValidationError(f"--const expects KEY=VALUE, got '{item}'")
        try:
            constants[key.strip()] = float(value)
        except ValueError:
            raise ConfigValidationError(f"--const {key}: '{value}' is not a number") from None
    return constants


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file values first, then every flag that was given."""
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    values = base.model_dump()
    if args.const:
        values["constants"] = {**values["constants"], **_parse_constants(args.const)}
    if args.t_range is not None:
        values["t0"], values["t1"] = args.t_range
    for key in (
        "scenario",
        "seed",
        "epsilon",
        "n_particles",
        "dt",
        "quantiles",
        "x0",
        "solver",
        "n_list",
        "dt_list",
        "seeds",
        "times",
        "workers",
        "out",
    ):
        value = getattr(args, key)
        if value is not None:
            values[key] = value
    return RunConfig.model_validate(values)


class Run:
    """Resolved inputs shared by every command: scenario, bound, N and dt."""

    def __init__(self, config: RunConfig, scenario: Scenario, command: str, progress: bool):
        self.config = config
        self.scenario = scenario
        self.command = command
        self.progress = progress
        self.rho_bound = estimate_rho_max(scenario)
        reference = REFERENCE_RUNS.get(config.scenario)
        choice = choose_parameters(scenario.length, self.rho_bound, config.epsilon)
        self.n_particles = config.n_particles or (reference.n_particles if reference else choice.n_particles)
        if config.dt is not None:
            self.dt = config.dt
        elif reference is not None:
            self.dt = reference.dt
        else:
            self.dt = scenario.length / (config.epsilon * self.n_particles)
        self.grid = config.time_grid(scenario, self.dt)

    @property
    def quantiles(self) -> list[float]:
        return self.config.quantiles or list(DEFAULT_QUANTILES)

    def out_path(self) -> Path:
        if self.config.out:
            return Path(self.config.out)
        return env_out_dir() / f"{self.command}-{self.scenario.name}.csv"

    def metadata(self, **extra: object) -> dict[str, object]:
        entries: dict[str, object] = {
            "command": self.command,
            "scenario": self.scenario.name,
            "constants": self.scenario.params,
            "domain": self.scenario.domain,
            "t_range": self.scenario.t_range,
            "seed": self.config.seed,
            "n_particles": self.n_particles,
            "dt": self.dt,
            "steps": self.grid.steps,
            "epsilon": self.config.epsilon,
            "rho_bound": self.rho_bound,
            "prng": PRNG_ID,
        }
        entries.update({f"tolerance.{k}": v for k, v in DEFAULT_TOLERANCES.as_dict().items()})
        entries.update(extra)
        return entries

    def finish(self, out: Path, **extra: object) -> None:
        write_metadata(out, self.metadata(**extra))
        print(f"Output saved to: {out}")


def _generate(run: Run) -> None:
    config = run.config.sampler_config(run.n_particles, run.dt)
    ensemble = generate_ensemble(
        run.scenario, run.grid, config, rho_bound=run.rho_bound, workers=run.config.workers
    )
    selected = select_by_quantile(ensemble, run.config.quantiles) if run.config.quantiles else ensemble
    length_scale, time_scale = emission_scales(run.scenario)
    out = write_ensemble_csv(run.out_path(), selected, length_scale, time_scale)
    run.finish(
        out,
        quantiles=run.config.quantiles,
        mean_acceptance=sum(ensemble.meta.accepted_fractions) / len(ensemble.meta.accepted_fractions),
    )


def _oracle(run: Run) -> None:
    if run.config.solver == "guidance":
        starts = run.config.x0 or [
            invert_cpf(run.scenario, p, run.grid.t0) for p in run.quantiles
        ]
        oracles = guidance_oracles(run.scenario, starts, run.grid)
    else:
        oracles = quantile_oracles(run.scenario, run.quantiles, run.grid)
    length_scale, time_scale = emission_scales(run.scenario)
    out = write_oracle_csv(run.out_path(), oracles, length_scale, time_scale)
    run.finish(out, solver=run.config.solver)


def _compare(run: Run) -> None:
    config = run.config.sampler_config(run.n_particles, run.dt)
    ensemble = generate_ensemble(
        run.scenario, run.grid, config, rho_bound=run.rho_bound, workers=run.config.workers
    )
    subset = select_by_quantile(ensemble, run.quantiles)
    oracles = quantile_oracles(run.scenario, run.quantiles, run.grid)
    reports = [compare_trajectories(ds, oracle) for ds, oracle in zip(subset, oracles)]
    for report in reports:
        logger.info("P=%g: sup %.4g, rms %.4g", report.label, report.sup_error, report.rms_error)
    out = write_compare_csv(run.out_path(), reports)
    run.finish(out, quantiles=run.quantiles)


def _sweep(run: Run) -> None:
    config = run.config
    report = convergence_sweep(
        run.scenario,
        config.n_list or [run.n_particles],
        config.dt_list or [run.dt],
        config.seeds or [config.seed],
        config.quantiles or [0.5],
        epsilon=config.epsilon,
        rho_bound=run.rho_bound,
        workers=config.workers,
        progress=run.progress,
    )
    out = write_sweep_csv(run.out_path(), report)
    run.finish(out, n_list=report.ns(), failed_rows=len(report.failed_rows()))


def _sample_test(run: Run) -> None:
    config = run.config
    times = config.times or [run.grid.t0, 0.5 * (run.grid.t0 + run.grid.t1), run.grid.t1]
    seeds = config.seeds or [config.seed + k for k in range(DEFAULT_SAMPLE_TEST_SEEDS)]
    report = sample_test(
        run.scenario, times, seeds, run.n_particles, rho_bound=run.rho_bound, progress=run.progress
    )
    out = write_sample_test_csv(run.out_path(), report)
    run.finish(out, alpha=report.alpha, pass_rate=report.pass_rate)


COMMANDS: dict[str, Callable[[Run], None]] = {
    "generate": _generate,
    "oracle": _oracle,
    "compare": _compare,
    "sweep": _sweep,
    "sample-test": _sample_test,
}


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    logging.basicConfig(
        format="[%(module)-12s] %(message)s",
        level=logging.DEBUG if args.verbose else env_log_level(),
        force=True,
    )

    try:
        config = resolve_config(args)
        scenario = config.build_scenario()
        run = Run(config, scenario, args.command, args.progress)
        COMMANDS[args.command](run)
    except UnknownScenarioError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except NodeEncounterError as exc:
        print(f"Error: {exc.diagnostics()}", file=sys.stderr)
        return EXIT_NODE
    except (
        ValidationError,
        ConfigValidationError,
        BoundViolationError,
        QuantileBoundaryError,
        SamplingStalledError,
        UnsupportedOperationError,
    ) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
