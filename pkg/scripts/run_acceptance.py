"""Run the acceptance suite and print only the PASS/FAIL lines.

    python scripts/run_acceptance.py            # all ten criteria (several minutes)
    python scripts/run_acceptance.py --fast     # skip the long simulation criteria 2, 4, 8
"""
import argparse
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fast", action="store_true", help="skip criteria marked slow")
    args = ap.parse_args()
    cmd = [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider"]
    if args.fast:
        cmd += ["-m", "not slow"]
    out = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True).stdout
    lines = sorted({ln for ln in out.splitlines() if ln.startswith(("PASS criterion", "FAIL criterion"))},
                   key=lambda s: int(s.split()[2].rstrip(":")))
    print("\n".join(lines))
    return 0 if lines and all(ln.startswith("PASS") for ln in lines) else 1


if __name__ == "__main__":
    sys.exit(main())
