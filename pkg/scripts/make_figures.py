"""Write every figure's data, metadata and gnuplot script into one directory."""
import argparse
import time

from relaycoop.cli import FIGURES, write_figure

ap = argparse.ArgumentParser()
ap.add_argument("out", nargs="?", default="figures")
ap.add_argument("--only", nargs="*", choices=sorted(FIGURES))
args = ap.parse_args()

for fid in args.only or FIGURES:
    t0 = time.perf_counter()
    path = write_figure(fid, args.out)
    print(f"{path}  ({time.perf_counter() - t0:.1f} s)")
