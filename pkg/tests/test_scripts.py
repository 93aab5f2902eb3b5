import subprocess
import sys
from pathlib import Path

SCRIPT = Path(__file__).resolve().parent.parent / "scripts" / "evidence_tables.py"


def run(args):
    return subprocess.run([sys.executable, str(SCRIPT)] + args, capture_output=True, text=True)


def test_decay_table():
    proc = run(["decay", "--max-l", "6"])
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert lines[0].startswith("l,")
    assert len(lines) == 6  # header + l = 2..6
    # every numeric column decays towards zero
    cols = list(zip(*(ln.split(",")[1:4] for ln in lines[1:])))
    for col in cols:
        vals = [float(x) for x in col]
        assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_ratio_table():
    proc = run(["ratios", "--avoid", "321", "--max-n", "12"])
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert len(lines) == 12  # header + ratios for n = 1..11
    assert lines[1].split(",")[1] == "2/1"
    assert all(ln.endswith("4.000000") for ln in lines[1:])
