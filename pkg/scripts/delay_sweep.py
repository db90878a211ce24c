"""Closed-form vs simulated delay on the symmetric family, one CSV row per grid point."""
import argparse
import itertools
import sys

from relaycoop import analysis, presets, sim

ap = argparse.ArgumentParser()
ap.add_argument("--horizon", type=int, default=1_000_000)
ap.add_argument("--reps", type=int, default=10)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

w = sys.stdout.write
w("alpha,lam_hat,r,D_closed_form,D_sim_1,D_sim_2,ci_1,ci_2\n")
for i, (a, lh, r) in enumerate(itertools.product((0.5, 0.7, 0.9), (0.05, 0.1, 0.15), (0.5, 0.9))):
    s = presets.symmetric_delay_inputs(alpha=a, lam_hat=lh, r=r)
    _, D = analysis.symmetric_delay_closed_form(s)
    st = sim.run(sim.SimConfig(*presets.symmetric_system(s), horizon=args.horizon, warmup=args.horizon // 100,
                               replications=args.reps, seed=args.seed + i))
    w(f"{a},{lh},{r},{D:.6g},{st.D[0]:.6g},{st.D[1]:.6g},{st.ci['D'][0]:.3g},{st.ci['D'][1]:.3g}\n")
    sys.stdout.flush()
