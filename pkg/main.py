import os

from dotenv import load_dotenv

from src.cli import run_command

load_dotenv()


def main():
    out_dir = os.getenv("BOHM_DS_OUT_DIR", ".")

    print("=== HARMONIC OSCILLATOR: DENSITY SAMPLING VS QUANTILE ORACLE ===")

    steps = [
        ["generate", "--scenario", "harmonic", "--quantiles", "0.1", "0.3", "0.5", "0.7", "0.9"],
        ["oracle", "--scenario", "harmonic", "--quantiles", "0.1", "0.3", "0.5", "0.7", "0.9"],
        ["compare", "--scenario", "harmonic", "--quantiles", "0.1", "0.3", "0.5", "0.7", "0.9"],
    ]
    for argv in steps:
        out = os.path.join(out_dir, f"harmonic-{argv[0]}.csv")
        status = run_command(argv + ["--out", out])
        if status != 0:
            print(f"Error: '{argv[0]}' exited with status {status}")
            return

    print(f"\nFiles generated in {out_dir}: harmonic-generate.csv, harmonic-oracle.csv, harmonic-compare.csv")


if __name__ == "__main__":
    main()
