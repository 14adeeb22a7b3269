"""Drive the command-line tool with JSON job files and show the exit codes.

Runs each command through ``python3 -m soliton_forge`` in a scratch directory.

    python3 demos/cli_jobs.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

JOBS = {
    "half.json": {"class": "shrinking", "base_dim": 1, "lambdas": [-0.5]},
    "canonical.json": {"class": "steady", "base_dim": 1, "lambdas": [-1.0], "E": -1.0, "umin": 0.0},
    "bad.json": {"class": "shrinking", "base_dim": 1, "lambdas": [-1.5], "E": 1.0},
}

RUNS = [
    ["criticals", "--job", "half.json"],
    ["classify", "--job", "half.json", "--E-mode", "E1"],
    ["construct", "--job", "half.json", "--E", "2"],
    ["construct", "--job", "canonical.json", "--samples", "8", "--out", "canonical.csv"],
    ["sweep", "--job", "half.json", "--E-min", "0.2", "--E-max", "1.8", "--steps", "5"],
    ["verify", "--job", "canonical.json", "--samples", "40"],
    ["verify", "--job", "canonical.json", "--samples", "40", "--tol", "-1"],
    ["classify", "--job", "bad.json"],
]


def main():
    with tempfile.TemporaryDirectory() as tmp:
        for name, job in JOBS.items():
            Path(tmp, name).write_text(json.dumps(job))
        for argv in RUNS:
            print("$ soliton-forge " + " ".join(argv))
            proc = subprocess.run(
                [sys.executable, "-m", "soliton_forge", *argv], cwd=tmp, capture_output=True, text=True
            )
            for stream in (proc.stdout, proc.stderr):
                if stream.strip():
                    print(stream.rstrip())
            print(f"[exit {proc.returncode}]\n")
        print("canonical.csv:")
        print(Path(tmp, "canonical.csv").read_text().rstrip())


if __name__ == "__main__":
    main()
