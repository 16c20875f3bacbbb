import csv
import math

import pytest

from src.cli import EXIT_INVALID, EXIT_NODE, EXIT_OK, EXIT_USAGE, build_parser, resolve_config, run_command
from src.records import read_ensemble_csv, read_metadata, read_oracle_csv, read_sweep_csv


def read_dicts(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_generate_is_reproducible(tmp_path):
    """Test the same flags write byte-identical CSV and metadata."""
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["generate", "--scenario", "harmonic", "--n", "200", "--dt", "0.1", "--seed", "9"]
    assert run_command(argv + ["--out", str(first)]) == EXIT_OK
    assert run_command(argv + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a.csv.meta").read_text() == (tmp_path / "b.csv.meta").read_text()

    table = read_ensemble_csv(first)
    assert table.positions.shape == (200, 31)
    meta = read_metadata(first)
    assert meta["seed"] == "9"
    assert meta["n_particles"] == "200"
    assert meta["prng"].startswith("numpy.random.PCG64")


def test_generate_selected_quantiles(tmp_path, capsys):
    """Test --quantiles writes only the matching ranks."""
    out = tmp_path / "selected.csv"
    code = run_command(
        ["generate", "--scenario", "eigenstate", "--n", "100", "--dt", "0.1", "--quantiles", "0.25", "0.75", "--out", str(out)]
    )
    assert code == EXIT_OK
    assert read_ensemble_csv(out).indices == (24, 74)
    assert f"Output saved to: {out}" in capsys.readouterr().out


def test_unknown_scenario_is_a_usage_error(tmp_path, capsys):
    """Test an unknown scenario name exits 2 and names the valid ones."""
    code = run_command(["generate", "--scenario", "nosuch", "--out", str(tmp_path / "x.csv")])
    assert code == EXIT_USAGE
    assert "harmonic" in capsys.readouterr().err


def test_unknown_subcommand_is_a_usage_error():
    """Test argparse rejects an unknown command."""
    assert run_command(["explode"]) == EXIT_USAGE


@pytest.mark.parametrize(
    "flags",
    [
        ["--quantiles", "1.5"],
        ["--epsilon", "2"],
        ["--dt", "-0.1"],
        ["--const", "omega"],
        ["--const", "omega=-3"],
        ["--seed", "abc"],
        ["--n", "x"],
        ["--n", "1.5"],
        ["--dt", "fast"],
    ],
)
def test_invalid_values_exit_3(tmp_path, flags):
    """Test validation failures exit 3."""
    out = tmp_path / "bad.csv"
    assert run_command(["generate", "--scenario", "harmonic", "--n", "50", "--out", str(out)] + flags) == EXIT_INVALID
    assert not out.exists()


def test_density_only_guidance_exits_3(tmp_path):
    """Test guidance on a density-only scenario is unsupported."""
    out = tmp_path / "guidance.csv"
    code = run_command(["oracle", "--scenario", "diffusion", "--dt", "0.5", "--solver", "guidance", "--out", str(out)])
    assert code == EXIT_INVALID


def test_node_encounter_exits_4(tmp_path, capsys):
    """Test launching guidance on a wall node exits 4 with diagnostics."""
    out = tmp_path / "node.csv"
    code = run_command(
        ["oracle", "--scenario", "square-well", "--solver", "guidance", "--x0", "0.0", "--out", str(out)]
    )
    assert code == EXIT_NODE
    assert "node encounter" in capsys.readouterr().err


def test_oracle_quantile_output(tmp_path):
    """Test the default quantile oracle writes nine deciles."""
    out = tmp_path / "oracle.csv"
    assert run_command(["oracle", "--scenario", "harmonic", "--out", str(out)]) == EXIT_OK
    table = read_oracle_csv(out)
    assert table.labels == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    assert table.positions.shape == (9, 31)
    assert read_metadata(out)["solver"] == "quantile"


def test_compare_free_median(tmp_path):
    """Test the sampled median of the free packet tracks x = 0 within order-statistic noise."""
    out = tmp_path / "compare.csv"
    n = 2000
    code = run_command(
        ["compare", "--scenario", "free", "--n", str(n), "--seed", "5", "--quantiles", "0.5", "--out", str(out)]
    )
    assert code == EXIT_OK
    (row,) = read_dicts(out)
    rho_at_end = 1.0 / (math.sqrt(2 * math.pi) * 3.7811)
    assert float(row["sup_error"]) < 5 * math.sqrt(0.25 / n) / rho_at_end
    assert float(row["step_change_bound"]) == pytest.approx(2 * 50.0 / n)
    assert int(row["index"]) == 999


def test_sweep_command(tmp_path):
    """Test one sweep row per (N, dt, seed, P)."""
    out = tmp_path / "sweep.csv"
    code = run_command(
        [
            "sweep",
            "--scenario", "eigenstate",
            "--n-list", "100", "200",
            "--dt", "0.1",
            "--dt-list", "0.1",
            "--seeds", "1", "2",
            "--quantiles", "0.5",
            "--workers", "2",
            "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    rows = read_sweep_csv(out)
    assert [(row.n, row.seed) for row in rows] == [(100, 1), (100, 2), (200, 1), (200, 2)]
    assert all(row.ok for row in rows)


def test_sample_test_command(tmp_path):
    """Test one KS row per (seed, t)."""
    out = tmp_path / "ks.csv"
    code = run_command(
        ["sample-test", "--scenario", "free", "--n", "300", "--seeds", "1", "2", "--times", "0", "1.5", "--out", str(out)]
    )
    assert code == EXIT_OK
    rows = read_dicts(out)
    assert len(rows) == 4
    assert {row["passed"] for row in rows} <= {"true", "false"}


def test_config_file_and_flag_precedence(tmp_path):
    """Test flags override values read from --config."""
    config_path = tmp_path / "run.ini"
    config_path.write_text("[run]\nscenario = eigenstate\nn_particles = 80\ndt = 0.1\nseed = 3\n\n[eigenstate]\nomega = 6.0\n")
    out = tmp_path / "from-config.csv"
    assert run_command(["generate", "--config", str(config_path), "--seed", "4", "--out", str(out)]) == EXIT_OK
    meta = read_metadata(out)
    assert meta["scenario"] == "eigenstate"
    assert meta["n_particles"] == "80"
    assert meta["seed"] == "4"
    assert "omega:6" in meta["constants"]


def test_const_flag_merges_constants():
    """Test repeated --const flags build the constants map."""
    args = build_parser().parse_args(
        ["generate", "--scenario", "harmonic", "--const", "omega=6", "--const", "m=2", "--t-range", "0", "1.5"]
    )
    config = resolve_config(args)
    assert config.constants == {"omega": 6.0, "m": 2.0}
    assert isinstance(config.t1, float)
    assert (config.t0, config.t1) == (0.0, 1.5)


def test_default_output_directory(tmp_path, monkeypatch):
    """Test outputs land in BOHM_DS_OUT_DIR when --out is absent."""
    monkeypatch.setenv("BOHM_DS_OUT_DIR", str(tmp_path))
    assert run_command(["oracle", "--scenario", "eigenstate", "--dt", "0.5"]) == EXIT_OK
    assert (tmp_path / "oracle-eigenstate.csv").exists()
    assert (tmp_path / "oracle-eigenstate.csv.meta").exists()
