"""The command-line tool end to end on the shipped configs.

python demos/cli_pipeline.py [outdir]
"""
import subprocess
import sys
from pathlib import Path

here = Path(__file__).resolve().parent
out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)


def osig(*args):
    cmd = [sys.executable, "-m", "osig", *map(str, args)]
    print("$ osig", " ".join(map(str, args)))
    res = subprocess.run(cmd, capture_output=True, text=True)
    print(res.stdout.rstrip() or res.stderr.rstrip(), "\n  exit", res.returncode)
    return res.returncode


bq = here / "configs" / "beer_quiche.json"
osig("reach", bq, "-o", out / "bq_mask.bin")
osig("solve", bq, "--mask", out / "bq_mask.bin", "-o", out / "bq_values.bin")
osig("dual-solve", bq, "-o", out / "bq_conj.bin")
osig("simulate", bq, "--values", out / "bq_values.bin", "--conjugate", out / "bq_conj.bin",
     "--x0", "0,0", "--runs", 1000, "--seed", 7, "-o", out / "bq.jsonl")
osig("export", bq, "value", "--values", out / "bq_values.bin", "--x0", "0,0", "-o", out / "bq_value.csv")
osig("export", bq, "trajectories", "--trajectories", out / "bq.jsonl", "-o", out / "bq_traj.csv")

hx = here / "configs" / "hexner_stateless.json"
osig("solve", hx, "-o", out / "hx_values.bin")
osig("export", hx, "value", "--values", out / "hx_values.bin", "--step", 3, "-o", out / "hx_value_t03.csv")
osig("export", hx, "reveal-delay", "--values", out / "hx_values.bin", "--runs", 20, "-o", out / "hx_reveal.csv")

# failures map to exit codes: 1 for usage or config problems
osig("simulate", bq, "--values", out / "missing.bin", "-o", out / "x.jsonl")
osig("verify", "--only", "beer_quiche", "critical_time")
