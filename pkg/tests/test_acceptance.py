"""Acceptance criteria 1-10, one PASS/FAIL line each.

Lines are collected in RESULTS and printed in the terminal summary (see
conftest.py); run `python scripts/run_acceptance.py` to see only them.
"""
import itertools
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import stats

from conftest import pole_case, random_params, random_probs, random_supported
from relaycoop import analysis, bvp, kernel, phy, presets, sim
from relaycoop.model import conservation_residuals, derive_coefficients, endogenous_arrivals

RESULTS = []

pytestmark = pytest.mark.acceptance


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append((n, line))
    print(line)
    assert ok, line


def _sigma(ci, reps):
    """Standard error behind a 95% t half-width over `reps` batches."""
    return ci / stats.t.ppf(0.975, reps - 1)


# ---------------------------------------------------------------- 1. PHY table

def test_criterion_01_phy_table():
    expect = {0.2: (0.74, 0.92, 0.99, 0.83), 1.0: (0.23, 0.66, 0.96, 0.5)}
    t0 = time.perf_counter()
    got = {g: phy.reference_table(g) for g in expect}
    elapsed = time.perf_counter() - t0
    keys = ("direct", "user_relay", "relay_alone", "relay_both")
    misses = [f"g={g} {k}={got[g][k]:.3f} vs {v}" for g, vals in expect.items()
              for k, v in zip(keys, vals) if abs(got[g][k] - v) > 0.01]
    report(1, not misses and elapsed < 1.0,
           f"PHY table within 0.01, {elapsed * 1e3:.1f} ms" + (f"; misses: {', '.join(misses)}" if misses else ""))


# ---------------------------------------------------------------- 2. closed form vs simulation

@pytest.mark.slow
def test_criterion_02_closed_form_delay_vs_simulation():
    bad, worst = [], 0.0
    for i, (a, lh, r) in enumerate(itertools.product((0.5, 0.7, 0.9), (0.05, 0.1, 0.15), (0.5, 0.9))):
        s = presets.symmetric_delay_inputs(alpha=a, lam_hat=lh, r=r)
        _, D = analysis.symmetric_delay_closed_form(s)
        params, probs = presets.symmetric_system(s)
        st = sim.run(sim.SimConfig(params, probs, horizon=1_000_000, warmup=10_000, replications=10, seed=100 + i))
        for k in range(2):
            err = abs(st.D[k] - D)
            worst = max(worst, err / D)
            if err > 0.02 * D + st.ci["D"][k]:
                bad.append(f"alpha={a} lam={lh} r={r} relay {k + 1}: sim {st.D[k]:.3f}+-{st.ci['D'][k]:.3f} "
                           f"vs {D:.3f}")
    report(2, not bad, f"18 points x 10 reps x 1e6 slots, worst rel err {worst:.4f}"
           + (f"; misses: {'; '.join(bad)}" if bad else ""))


# ---------------------------------------------------------------- 3. boundary value solver vs closed form

def test_criterion_03_bvp_vs_closed_form():
    out = []
    ok = True
    for kw, tol, case in ((dict(alpha=0.5, alpha_star=2 / 3), 1e-4, "dirichlet"), (dict(), 1e-3, "rh")):
        s = presets.symmetric_delay_inputs(**kw)
        E, _ = analysis.symmetric_delay_closed_form(s)
        sol = bvp.solve(derive_coefficients(*presets.symmetric_system(s)))
        err = abs(sol.E[0] - E)
        ok &= sol.case == case and err < tol
        out.append(f"{sol.case} |dE1|={err:.2e} (tol {tol:g})")
    report(3, ok, ", ".join(out))


# ---------------------------------------------------------------- 4. asymmetric solution vs simulation

@pytest.mark.slow
def test_criterion_04_asymmetric_bvp_vs_simulation():
    params, probs = presets.asymmetric_system(lam_hat=(0.03, 0.02))
    sol = bvp.solve(derive_coefficients(params, probs))
    reps = 10
    st = sim.run(sim.SimConfig(params, probs, horizon=1_000_000, warmup=10_000, replications=reps, seed=4))
    rows = {
        "E1": (sol.E[0], st.E[0], st.ci["E"][0]),
        "D1": (sol.D[0], st.D[0], st.ci["D"][0]),
        # H(1,0) = P(N2 = 0), H(0,1) = P(N1 = 0)
        "H10": (sol.h10, st.p_empty[1], st.ci["p_empty"][1]),
        "H01": (sol.h01, st.p_empty[0], st.ci["p_empty"][0]),
        "H00": (sol.h00, st.p_both_empty, st.ci["p_both_empty"][0]),
    }
    ok, parts = True, []
    for name, (an, sm, ci) in rows.items():
        rel, z = abs(sm - an) / an, abs(sm - an) / _sigma(ci, reps)
        ok &= rel <= 0.03 or z <= 3
        parts.append(f"{name} {an:.4f}/{sm:.4f} ({100 * rel:.2f}%, {z:.1f}sd)")
    report(4, ok, "analytic/sim " + ", ".join(parts))


# ---------------------------------------------------------------- 5. conservation of flow

def test_criterion_05_conservation_of_flow():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        _, _, c = random_supported(rng)
        s = bvp.solve(c)
        worst = max(worst, *np.abs(conservation_residuals(c, s.h00, s.h10, s.h01)))
    report(5, worst < 1e-6, f"100 random sets, max residual {worst:.2e}")


# ---------------------------------------------------------------- 6. kernel properties

def _random_stable(rng):
    while True:
        params, probs = random_params(rng, lam_max=0.3), random_probs(rng)
        c = derive_coefficients(params, probs)
        if analysis.StabilityRegion.from_rates(c.T, c.a, c.b).contains(*c.lam):
            return c


def test_criterion_06_kernel_properties():
    rng = np.random.default_rng(6)
    worst_circle, worst_one, order_bad, sign_bad, samples = 0.0, 0.0, 0, 0, 0
    off_one, off_one_outside = 0, 0
    for _ in range(1000):
        c = _random_stable(rng)
        k = kernel.build_kernel(c)
        mx, at1 = kernel.unit_circle_check(k, 720)
        worst_circle, worst_one = max(worst_circle, mx), max(worst_one, at1)
        if at1 >= 1e-10:
            off_one += 1
            off_one_outside += bool(np.any(c.lam >= c.T * c.b))
        try:
            bp = kernel.branch_points(k)
        except kernel.KernelAssumptionError:
            order_bad += 1
            continue
        x1, x2, x3, x4 = bp.x
        order_bad += not (0 < x1 < x2 <= 1 < x3 < x4)
        xs = rng.uniform(-1.0, x4 + 1.0, 10)
        roots = np.asarray(bp.x)
        xs = xs[np.min(np.abs(xs[:, None] - roots[None, :]), axis=1) > 1e-9 * (1 + np.abs(xs))]
        d = np.polynomial.polynomial.polyval(xs, k.discriminant_x())
        neg = ((xs > x1) & (xs < x2)) | ((xs > x3) & (xs < x4))
        sign_bad += int(np.sum((d < 0) != neg))
        samples += len(xs)
    ok = worst_circle < 1 and worst_one < 1e-10 and order_bad == 0 and sign_bad == 0 and samples >= 9_900
    report(6, ok, f"1000 sets: max|X0| {worst_circle:.6f}, |X0(1)-1| {worst_one:.1e}, ordering failures "
                  f"{order_bad}, sign mismatches {sign_bad}/{samples}; X0(1) != 1 on {off_one} sets, "
                  f"{off_one_outside} of them with some lam_i >= T b_i")


# ---------------------------------------------------------------- 7. contour and map fidelity

def test_criterion_07_contour_and_map_fidelity():
    sets = {"asymmetric": derive_coefficients(*presets.asymmetric_system(lam_hat=(0.03, 0.02))),
            "symmetric": derive_coefficients(*presets.symmetric_system(presets.symmetric_delay_inputs()))}
    ok, parts = True, []
    for name, c in sets.items():
        k = kernel.build_kernel(c)
        for side, kk in (("x", k), ("y", k.swapped())):
            C = kernel.contour(kk, "M", bvp.DEFAULT_GRID)
            g = bvp.theodorsen_solve(C)
            x = g(np.exp(1j * g.phi))
            m_err = np.max(np.abs(np.abs(x) ** 2 - C.m(x.real)))
            h = 1e-5
            fd = (g.inverse(1 + h) - g.inverse(1 - h)).real / (2 * h)
            gp_err = abs(g.gamma_prime_1 - fd)
            ok &= g.step <= 1e-6 and m_err < 1e-6 and gp_err < 1e-6
            parts.append(f"{name}/{side}: step {g.step:.0e}, |x|^2-m {m_err:.0e}, gamma' {gp_err:.0e}")
        e1 = bvp.solve(c, grid_size=bvp.DEFAULT_GRID).E[0]
        e2 = bvp.solve(c, grid_size=2 * bvp.DEFAULT_GRID).E[0]
        ok &= abs(e2 - e1) < 1e-5
        parts.append(f"{name}: dE1(M->2M) {abs(e2 - e1):.0e}")
    report(7, ok, "; ".join(parts))


# ---------------------------------------------------------------- 8. stability frontier

@pytest.mark.slow
def test_criterion_08_stability_frontier():
    params, probs = presets.asymmetric_system(storage="exclusive")
    origin = endogenous_arrivals(params, probs, "stability").sum(0)
    reg = analysis.stability_region(params, probs)
    cfg = sim.SimConfig(params, probs, horizon=200_000, warmup=2_000, replications=5, mode="stability", seed=8)
    ok, parts = True, []
    for deg in np.linspace(0, 90, 8):
        u = np.array([np.cos(np.radians(deg)), np.sin(np.radians(deg))])
        u = np.where(np.abs(u) < 1e-12, 0.0, u)
        edge = reg.boundary_radius(u, origin)
        found = sim.region_probe(cfg, u, rel_tol=0.01)
        votes = []
        for f, want in ((0.95, False), (1.05, True)):
            c = sim.SimConfig(replace(params, lam_hat=tuple(f * edge * u)), probs,
                              horizon=200_000, warmup=2_000, replications=20, mode="stability", seed=int(deg) + 80)
            drift = sim.run(c).drift
            votes.append(int(np.sum(np.any(drift > sim.DRIFT_THRESHOLD, axis=1) == want)))
        rel = abs(found - edge) / edge
        ok &= rel <= 0.05 and min(votes) >= 19
        parts.append(f"{deg:.1f}deg {100 * rel:.1f}% {votes[0]}/{votes[1]}")
    report(8, ok, "direction, probe error, stable@0.95/unstable@1.05 out of 20: " + ", ".join(parts))


# ---------------------------------------------------------------- 9. N-user reproduction

def test_criterion_09_n_user():
    ok, parts = True, []
    want_onset = {0.2: 13, 1.0: 7}
    for g in (0.2, 1.0):
        params, probs, pdr = presets.n_user_system(g)
        per_user = [analysis.symmetric_n_user(params, probs, *pdr(n), n).per_user for n in range(1, 21)]
        mono = bool(np.all(np.diff(per_user) < 0))
        onset = analysis.instability_onset(params, probs, pdr)
        convex = {n: analysis.stability_region(params, probs, n).convex for n in range(1, 12)}
        if g == 0.2:
            flags = all(convex[n] for n in range(1, 5)) and not any(convex[n] for n in range(5, 12))
        else:
            flags = all(convex[n] for n in range(1, 3)) and not any(convex[n] for n in range(3, 12))
        ok &= mono and onset == want_onset[g] and flags
        parts.append(f"g={g}: monotone {mono}, onset {onset} (want {want_onset[g]}), convexity flip "
                     f"{'as expected' if flags else 'absent, convex for N=1..11: ' + str(all(convex.values()))}")
    report(9, ok, "; ".join(parts))


# ---------------------------------------------------------------- 10. property suites

def test_criterion_10_property_suites():
    rng = np.random.default_rng(10)
    swap_err = 0.0
    for _ in range(5):
        _, _, c = random_supported(rng, margin=0.8)
        s, ss = bvp.solve(c, grid_size=256), bvp.solve(c.swapped(), grid_size=256)
        swap_err = max(swap_err, *np.abs(ss.E - s.E[::-1]) / s.E, abs(ss.h10 - s.h01), abs(ss.h01 - s.h10))
    c = derive_coefficients(*pole_case())
    s, ss = bvp.solve(c), bvp.solve(c.swapped())
    swap_err = max(swap_err, *np.abs(ss.E - s.E[::-1]) / s.E)
    params, probs = presets.asymmetric_system(storage="exclusive")
    r, rs = analysis.stability_region(params, probs), analysis.stability_region(params.swapped(), probs.swapped())
    swap_err = max(swap_err, *np.abs(np.array([rs.A1, rs.A2, rs.B1, rs.B2]) - [r.B1, r.B2, r.A1, r.A2]))

    conserved = True
    for i in range(5):
        p, q = random_params(rng, lam_max=0.3), random_probs(rng)
        conserved &= sim.replicate(sim.SimConfig(p, q, horizon=50_000, warmup=500), np.random.default_rng(i)).conserved

    p, q = presets.symmetric_system(presets.symmetric_delay_inputs())
    cfg = sim.SimConfig(p, q, horizon=100_000, warmup=1_000, replications=2, seed=3)
    a, b = sim.run(cfg), sim.run(cfg)
    determ = np.array_equal(a.E, b.E) and np.array_equal(a.p_empty, b.p_empty)

    low = np.inf
    for _ in range(10):
        _, _, c = random_supported(rng, margin=0.8)
        sol = bvp.solve(c, grid_size=256)
        for side in (sol.x_side, sol.y_side):
            low = min(low, bvp.pgf_coefficients(side, n=20).min())
    ok = swap_err < 1e-12 and conserved and determ and low >= -1e-6
    report(10, ok, f"swap err {swap_err:.1e}, conservation exact {conserved}, deterministic {determ}, "
                   f"min pgf coefficient {low:.2e}")
