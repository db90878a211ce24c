"""Boundary value solution vs the exact truncated chain on random parameter sets.

Prints one row per set; the chain is the independent oracle in tests/oracle.py.
Heavy-tailed sets need a large lattice (--K) before the two agree.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from conftest import random_supported  # noqa: E402
from oracle import stationary, summary  # noqa: E402

from relaycoop import bvp  # noqa: E402

ap = argparse.ArgumentParser()
ap.add_argument("--sets", type=int, default=5)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--K", type=int, default=220, help="lattice side of the truncated chain")
ap.add_argument("--margin", type=float, default=0.8, help="max lam / (T b)")
args = ap.parse_args()

rng = np.random.default_rng(args.seed)
print("case,poles_x,poles_y,E1_bvp,E1_chain,E2_bvp,E2_chain,max_rel_err,chain_tail")
for _ in range(args.sets):
    params, probs, c = random_supported(rng, margin=args.margin)
    s = bvp.solve(c)
    o = summary(stationary(params, probs, K=args.K))
    pairs = [(s.E[0], o["E1"]), (s.E[1], o["E2"]), (s.h00, o["h00"]), (s.h10, o["h10"]), (s.h01, o["h01"])]
    err = max(abs(a - b) / abs(b) for a, b in pairs)
    print(f"{s.case},{s.x_side.poles.r if s.x_side.poles else 0},{s.y_side.poles.r if s.y_side.poles else 0},"
          f"{s.E[0]:.10g},{o['E1']:.10g},{s.E[1]:.10g},{o['E2']:.10g},{err:.2e},{o['tail']:.1e}")
