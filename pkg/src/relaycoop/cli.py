"""Command line: scenario files in, CSV (and gnuplot scripts) out.

Scenario files are plain `key = value` lines grouped under `[section]`
headers; `#` starts a comment. Units are part of key names.

    relaycoop run scenario.txt --out result.csv
    relaycoop compare scenario.txt --reps 10
    relaycoop figure thr-user --out figs/

Exit codes: 0 success, 1 comparison outside tolerance, 2 malformed scenario
or grid, 3 parameters outside the analytic domain (e.g. unstable relays).
"""
from __future__ import annotations

import argparse
import csv
import itertools
import logging
import os
import shutil
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, bvp, kernel, phy, presets, sim
from .model import SystemParams, derive_coefficients

log = logging.getLogger("relaycoop")

EXIT_OK, EXIT_TOLERANCE, EXIT_SCHEMA, EXIT_DOMAIN = 0, 1, 2, 3

TASKS = ("phy-table", "region", "throughput", "delay-closed-form", "delay-bvp", "simulate",
         "probe", "contour", "figure")


class ScenarioError(Exception):
    def __init__(self, msg, line=None):
        super().__init__(msg)
        self.line = line


# value parsers: (converter, expected count or None for any)
def _floats(n=None):
    def conv(s):
        vals = [float(v) for v in s.replace(";", ",").split(",") if v.strip()]
        if n is not None and len(vals) != n:
            raise ValueError(f"expected {n} values, got {len(vals)}")
        return vals
    return conv


def _float(s):
    return float(s)


def _int(s):
    return int(s)


def _str(s):
    return s.strip()


def _bool(s):
    v = s.strip().lower()
    if v not in ("true", "false", "yes", "no", "1", "0"):
        raise ValueError("expected true/false")
    return v in ("true", "yes", "1")


SYMMETRIC_KEYS = {"lam_hat_pkt_per_slot": _float, "t": _float, "alpha": _float, "alpha_star": _float,
                  "q": _float, "q_tilde": _float, "r": _float, "s_bar": _float, "s_tilde": _float,
                  "s12": _float}

SCHEMA = {
    "phy": {"threshold": _float, "user_dest_m": _floats(2), "user_relay_m": _floats(4),
            "relay_dest_m": _floats(2), "user_power_w": _floats(2), "relay_power_w": _floats(2),
            "pathloss_exponent": _float, "noise_w": _float, "capture": _bool},
    "probs": {"d_alone": _floats(2), "d_both": _floats(2), "r_alone": _floats(4), "r_both": _floats(4),
              "r_other": _floats(4), "relay": _floats(2), "relay_star": _floats(2),
              "relay_both": _floats(2), "capture": _bool},
    "params": {"t": _floats(2), "alpha": _floats(2), "alpha_star": _floats(2), "p_a": _floats(4),
               "lam_hat_pkt_per_slot": _floats(2), "storage": _str},
    "symmetric": SYMMETRIC_KEYS,
    "task": {"name": _str, "figure": _str, "thresholds": _floats(), "analytic": _str, "rel_tol": _float,
             "directions_deg": _floats(), "n_users": _int, "grid_size": _int},
    "sim": {"horizon_slots": _int, "warmup_slots": _int, "replications": _int, "seed": _int, "mode": _str},
    "grid": {k: _floats() for k in SYMMETRIC_KEYS},
    "output": {"path": _str},
}


def parse_scenario(text):
    """{section: {key: (value, line)}} with every key validated against SCHEMA."""
    out, section = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioError("unterminated section header", no)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ScenarioError(f"unknown section [{section}]", no)
            if section in out:
                raise ScenarioError(f"duplicate section [{section}]", no)
            out[section] = {}
            continue
        if section is None:
            raise ScenarioError("key outside any section", no)
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", no)
        key, val = (s.strip() for s in line.split("=", 1))
        conv = SCHEMA[section].get(key)
        if conv is None:
            raise ScenarioError(f"unknown key '{key}' in [{section}]", no)
        if key in out[section]:
            raise ScenarioError(f"duplicate key '{key}'", no)
        try:
            out[section][key] = (conv(val), no)
        except ValueError as e:
            raise ScenarioError(f"bad value for '{key}': {e}", no) from None
    return out


class Scenario:
    """Validated scenario: accessors raise ScenarioError anchored to the offending line."""

    def __init__(self, sections):
        self.s = sections
        task = self.get("task", "name")
        if task is None:
            raise ScenarioError("missing [task] name")
        if task not in TASKS:
            raise ScenarioError(f"unknown task '{task}'", self.line("task", "name"))
        self.task = task
        if "phy" in self.s and "probs" in self.s:
            raise ScenarioError("[phy] and [probs] are mutually exclusive", self.line("probs"))

    def get(self, section, key, default=None):
        return self.s.get(section, {}).get(key, (default, None))[0]

    def line(self, section, key=None):
        sec = self.s.get(section, {})
        if key is not None and key in sec:
            return sec[key][1]
        lines = [v[1] for v in sec.values()]
        return min(lines) if lines else None

    def _checked(self, fn, section):
        try:
            return fn()
        except ValueError as e:
            raise ScenarioError(str(e), self.line(section)) from None

    def probs(self):
        if "probs" in self.s:
            g = lambda k, n: np.reshape(self._require("probs", k), n)
            return self._checked(lambda: phy.SuccessProbabilities(
                g("d_alone", 2), g("d_both", 2), g("r_alone", (2, 2)), g("r_both", (2, 2)),
                g("r_other", (2, 2)), g("relay", 2), g("relay_star", 2), g("relay_both", 2),
                self.get("probs", "capture", False)).check(), "probs")
        geom = self.geometry()
        threshold = self.get("phy", "threshold", phy.CALIBRATION_THRESHOLD)
        noise = self.get("phy", "noise_w") or phy.reference_noise(geom)
        return self._checked(lambda: phy.build_success_matrix(
            geom, phy.PhyEnvironment(noise, threshold), self.get("phy", "capture", False)), "phy")

    def geometry(self):
        g = phy.REFERENCE_GEOMETRY
        v = lambda k, d: tuple(self.get("phy", k, d))
        ur = self.get("phy", "user_relay_m")
        return replace(g, user_dest_m=v("user_dest_m", g.user_dest_m),
                       user_relay_m=g.user_relay_m if ur is None else ((ur[0], ur[1]), (ur[2], ur[3])),
                       relay_dest_m=v("relay_dest_m", g.relay_dest_m),
                       user_power_w=v("user_power_w", g.user_power_w),
                       relay_power_w=v("relay_power_w", g.relay_power_w),
                       exponent=self.get("phy", "pathloss_exponent", g.exponent))

    def params(self):
        d = SystemParams()
        pa = self.get("params", "p_a")
        return self._checked(lambda: SystemParams(
            t=tuple(self.get("params", "t", d.t)), alpha=tuple(self.get("params", "alpha", d.alpha)),
            alpha_star=tuple(self.get("params", "alpha_star", d.alpha_star)),
            p_a=d.p_a if pa is None else ((pa[0], pa[1]), (pa[2], pa[3])),
            lam_hat=tuple(self.get("params", "lam_hat_pkt_per_slot", d.lam_hat)),
            storage=self.get("params", "storage", d.storage)), "params")

    def symmetric(self, **override):
        if "symmetric" not in self.s:
            raise ScenarioError(f"task '{self.task}' needs a [symmetric] section")
        vals = {k: v[0] for k, v in self.s["symmetric"].items()}
        vals.update(override)
        vals.setdefault("q_tilde", presets.DELAY_FAMILY["q_tilde"])
        missing = [k for k in SYMMETRIC_KEYS if k not in vals]
        if missing:
            raise ScenarioError(f"[symmetric] missing {', '.join(missing)}", self.line("symmetric"))
        vals["lam_hat"] = vals.pop("lam_hat_pkt_per_slot")
        return analysis.SymmetricDelayInputs(**vals)

    def system(self, **override):
        """(params, probs) from [symmetric] if present, else from [params] + [phy]/[probs]."""
        if "symmetric" in self.s:
            s = self.symmetric(**override)
            return self._checked(lambda: presets.symmetric_system(s), "symmetric")
        return self.params(), self.probs()

    def grid(self):
        """List of override dicts (one empty dict when there is no grid)."""
        if "grid" not in self.s:
            return [{}]
        items = self.s["grid"]
        for k, (vals, no) in items.items():
            if not vals:
                raise ScenarioError(f"empty grid for '{k}'", no)
        if "symmetric" not in self.s:
            raise ScenarioError("[grid] needs a [symmetric] base section", self.line("grid"))
        keys = list(items)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(items[k][0] for k in keys))]

    def _require(self, section, key):
        v = self.get(section, key)
        if v is None:
            raise ScenarioError(f"missing '{key}' in [{section}]", self.line(section))
        return v

    def sim_config(self, params, probs, args):
        mode = self.get("sim", "mode") or ("delay" if params.storage == "duplicate" else "stability")
        return self._checked(lambda: sim.SimConfig(
            params, probs, horizon=self.get("sim", "horizon_slots", 1_000_000),
            warmup=self.get("sim", "warmup_slots", 10_000),
            replications=args.reps or self.get("sim", "replications", 1),
            seed=args.seed if args.seed is not None else self.get("sim", "seed", 0), mode=mode), "sim")


# ---------------------------------------------------------------- table output

class Table:
    def __init__(self, header):
        self.header = list(header)
        self.rows = []

    def add(self, *row):
        if len(row) != len(self.header):
            raise ValueError("row length does not match header")
        self.rows.append(row)

    def write(self, path):
        _atomic_write(path, self._render())

    def _render(self):
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------- tasks

def task_phy_table(sc, args):
    tab = Table(["threshold", "direct", "user_relay", "relay_alone", "relay_both"])
    for g in sc.get("task", "thresholds", [0.2, 1.0]):
        t = phy.reference_table(g, sc.geometry())
        tab.add(g, t["direct"], t["user_relay"], t["relay_alone"], t["relay_both"])
    return tab


def task_region(sc, args):
    params, probs = sc.system()
    n = sc.get("task", "n_users", 2)
    reg = analysis.stability_region(params, probs, n)
    tab = Table(["vertex", "lam1_pkt_per_slot", "lam2_pkt_per_slot", "convex"])
    for i, (x, y) in enumerate(reg.polygon()):
        tab.add(i, x, y, reg.convex)
    return tab


def task_throughput(sc, args):
    params, probs = sc.system()
    model = "delay" if params.storage == "duplicate" else "stability"
    rep = analysis.throughput_two_user(params, probs, model)
    if not rep.stable:
        log.warning("relay arrival rates outside the stability region; throughput formulas do not apply")
    tab = Table(["user", "direct_pkt_per_slot", "relayed_pkt_per_slot", "total_pkt_per_slot",
                 "aggregate_pkt_per_slot", "stable"])
    for k in range(2):
        tab.add(k + 1, rep.direct[k], rep.relayed[k], rep.total[k], rep.aggregate, rep.stable)
    return tab


def _closed_form_rows(sc):
    grid = sc.grid()
    rows = []
    for ov in grid:
        s = sc.symmetric(**ov)
        rows.append((ov, s, *analysis.symmetric_delay_closed_form(s)))
    return grid, rows


def task_delay_closed_form(sc, args):
    grid, rows = _closed_form_rows(sc)
    keys = list(grid[0])
    tab = Table(keys + ["E_pkt", "D_slots"])
    for ov, _, E, D in rows:
        tab.add(*[ov[k] for k in keys], E, D)
    return tab


def _bvp_for(sc, args, ov):
    params, probs = sc.system(**ov)
    c = derive_coefficients(params, probs)
    dump = Path(args.out).with_suffix("") if (args.verbose and args.out) else None
    return bvp.solve(c, grid_size=args.grid_size or sc.get("task", "grid_size", bvp.DEFAULT_GRID),
                     dump_dir=dump)


def task_delay_bvp(sc, args):
    grid = sc.grid()
    keys = list(grid[0])
    tab = Table(keys + ["case", "H00", "H10", "H01", "E1_pkt", "E2_pkt", "D1_slots", "D2_slots",
                        "conservation_residual_1", "conservation_residual_2"])
    for ov in grid:
        s = _bvp_for(sc, args, ov)
        tab.add(*[ov[k] for k in keys], s.case, s.h00, s.h10, s.h01, *s.E, *s.D, *s.residuals)
    return tab


def task_simulate(sc, args):
    grid = sc.grid()
    keys = list(grid[0])
    tab = Table(keys + ["E1_pkt", "E2_pkt", "D1_slots", "D2_slots", "D1_ci95", "D2_ci95",
                        "P_N1_empty", "P_N2_empty", "P_both_empty", "thr_direct_1", "thr_direct_2",
                        "thr_relayed_1", "thr_relayed_2", "unstable_fraction", "conserved"])
    for ov in grid:
        params, probs = sc.system(**ov)
        st = sim.run(sc.sim_config(params, probs, args))
        tab.add(*[ov[k] for k in keys], *st.E, *st.D, *st.ci["D"], *st.p_empty, st.p_both_empty,
                *st.thr_direct, *st.thr_relayed, st.unstable_fraction, st.conserved)
    return tab


def task_probe(sc, args):
    params, probs = sc.system()
    cfg = sc.sim_config(params, probs, args)
    model = "delay" if cfg.mode == "delay" else "stability"
    from .model import endogenous_arrivals
    origin = endogenous_arrivals(params, probs, model).sum(0)
    reg = analysis.stability_region(params, probs)
    tab = Table(["direction_deg", "empirical_scale_pkt_per_slot", "analytic_scale_pkt_per_slot"])
    for deg in sc.get("task", "directions_deg", [0.0, 45.0, 90.0]):
        u = np.array([np.cos(np.radians(deg)), np.sin(np.radians(deg))])
        u = np.clip(u, 0, None)
        tab.add(deg, sim.region_probe(cfg, u), reg.boundary_radius(u, origin))
    return tab


def task_contour(sc, args):
    params, probs = sc.system()
    c = kernel.contour(kernel.build_kernel(derive_coefficients(params, probs)), "M",
                       args.grid_size or sc.get("task", "grid_size", bvp.DEFAULT_GRID))
    tab = Table(["phi_rad", "rho", "re", "im"])
    for row in zip(c.phi, c.rho, c.points.real, c.points.imag):
        tab.add(*row)
    return tab


# ---------------------------------------------------------------- figures

def _gp_script(tab, xcol, ycol, group=None, splot_col=None):
    """gnuplot script for `{name}.csv`; one series per distinct value of column `group`."""
    h = tab.header
    head = (f'set datafile separator ","\nset key autotitle columnhead\n'
            f'set xlabel "{h[xcol - 1]}"\nset ylabel "{h[ycol - 1]}"\n')
    if splot_col is not None:
        return head + (f'set zlabel "{h[splot_col - 1]}"\n'
                       f'splot "{{name}}.csv" using {xcol}:{ycol}:{splot_col} with points\n')
    if group is None:
        return head + f'plot "{{name}}.csv" using {xcol}:{ycol} with linespoints\n'
    vals = " ".join(dict.fromkeys(repr(float(r[group - 1])) for r in tab.rows))
    return head + (f'plot for [g in "{vals}"] "{{name}}.csv" using {xcol}:(column({group}) == g+0 ? '
                   f'column({ycol}) : 1/0) with linespoints title "{h[group - 1]}=".g\n')


def fig_stability(threshold):
    params, probs, pdr = presets.n_user_system(threshold)
    tab = Table(["N", "vertex", "lam1_pkt_per_slot", "lam2_pkt_per_slot", "convex", "sinr_threshold"])
    for n in range(1, 12):
        reg = analysis.stability_region(params, probs, n)
        for i, (x, y) in enumerate(reg.polygon()):
            tab.add(n, i, x, y, reg.convex, threshold)
    return tab, _gp_script(tab, 3, 4, group=1)


def fig_throughput(aggregate):
    col = "aggregate_pkt_per_slot" if aggregate else "per_user_pkt_per_slot"
    tab = Table(["sinr_threshold", "N", col, "direct_pkt_per_slot", "relayed_pkt_per_slot", "stable"])
    for g in (0.2, 1.0):
        params, probs, pdr = presets.n_user_system(g)
        for n in range(1, 21):
            r = analysis.symmetric_n_user(params, probs, *pdr(n), n)
            val = r.aggregate if aggregate else r.per_user
            tab.add(g, n, val, r.direct, r.lam_u.sum() / n, r.stable)
    return tab, _gp_script(tab, 2, 3, group=1)


def fig_delay(xname, xvals, fixed):
    tab = Table([xname, "lam_hat_pkt_per_slot", "r", "E_pkt", "D_slots", "stable"])
    for r in (0.5, 0.9):
        for x in xvals:
            for lh in np.linspace(0.01, 0.2, 20):
                s = presets.symmetric_delay_inputs(**{**fixed, xname: x, "lam_hat": lh, "r": r})
                try:
                    E, D = analysis.symmetric_delay_closed_form(s)
                    tab.add(x, lh, r, E, D, True)
                except analysis.InstabilityError:
                    tab.add(x, lh, r, float("nan"), float("nan"), False)
    return tab, _gp_script(tab, 1, 2, splot_col=5)


def fig_region(vary):
    tab = Table([vary, "vertex", "lam1_pkt_per_slot", "lam2_pkt_per_slot", "convex"])
    vals = (0.2, 0.4) if vary == "t1" else (0.9, 0.7)
    for v in vals:
        params, probs = presets.asymmetric_system(**({"t1": v} if vary == "t1" else {"alpha1_star": v}))
        reg = analysis.stability_region(params, probs)
        for i, (x, y) in enumerate(reg.polygon()):
            tab.add(v, i, x, y, reg.convex)
    return tab, _gp_script(tab, 3, 4, group=1)


FIGURES = {
    "stab-gamma02": lambda: fig_stability(0.2),
    "stab-gamma1": lambda: fig_stability(1.0),
    "thr-user": lambda: fig_throughput(False),
    "thr-aggr": lambda: fig_throughput(True),
    "delay-alpha-lambda": lambda: fig_delay("alpha", np.linspace(0.3, 1.0, 15), {}),
    "delay-t-lambda": lambda: fig_delay("t", np.linspace(0.02, 0.3, 15), {}),
    "delay-astar-lambda": lambda: fig_delay("alpha_star", np.linspace(0.5, 1.0, 11), {"alpha": 0.5}),
    "region-t1": lambda: fig_region("t1"),
    "region-astar1": lambda: fig_region("alpha1_star"),
}

FIXED_CONSTANTS = [
    ("calibration_target", phy.CALIBRATION_TARGET, "", "direct-link success used to fix the noise power"),
    ("calibration_threshold", phy.CALIBRATION_THRESHOLD, "", "SINR threshold of the calibration"),
    ("user_dest_m", 110.0, "m", "reference layout"),
    ("user_relay_m", 80.0, "m", "reference layout"),
    ("relay_dest_m", 80.0, "m", "reference layout"),
    ("user_power_w", 1e-3, "W", "reference layout"),
    ("relay_power_w", 1e-2, "W", "reference layout"),
    ("pathloss_exponent", 4.0, "", "reference layout"),
]


def write_figure(fid, out_dir):
    if fid not in FIGURES:
        raise ScenarioError(f"unknown figure '{fid}' (choose from {', '.join(FIGURES)})")
    tab, gp = FIGURES[fid]()
    out_dir = Path(out_dir)
    tab.write(out_dir / f"{fid}.csv")
    meta = Table(["name", "value", "unit", "source"])
    for row in FIXED_CONSTANTS:
        meta.add(*row)
    meta.write(out_dir / f"{fid}.meta.csv")
    _atomic_write(out_dir / f"{fid}.gp", gp.replace("{name}", fid))
    return out_dir / f"{fid}.csv"


# ---------------------------------------------------------------- compare

def compare(sc, args):
    """Analytic task vs simulation on the scenario grid; returns (table, all_within)."""
    analytic = sc.get("task", "analytic", "delay-closed-form")
    if analytic not in ("delay-closed-form", "delay-bvp"):
        raise ScenarioError(f"cannot compare analytic task '{analytic}'", sc.line("task", "analytic"))
    tol = sc.get("task", "rel_tol", 0.02)
    grid = sc.grid()
    keys = list(grid[0])
    tab = Table(keys + ["analytic_D1_slots", "sim_D1_slots", "sim_D1_ci95", "rel_err", "ci_covers",
                        "within_tol"])
    ok = True
    for ov in grid:
        if analytic == "delay-closed-form":
            an = analysis.symmetric_delay_closed_form(sc.symmetric(**ov))[1]
        else:
            an = _bvp_for(sc, args, ov).D[0]
        params, probs = sc.system(**ov)
        st = sim.run(sc.sim_config(params, probs, args))
        d, ci = st.D[0], st.ci["D"][0]
        err = abs(d - an)
        within = err <= tol * an + ci
        ok &= bool(within)
        tab.add(*[ov[k] for k in keys], an, d, ci, err / an, err <= ci, within)
    return tab, ok


# ---------------------------------------------------------------- entry point

RUNNERS = {
    "phy-table": task_phy_table, "region": task_region, "throughput": task_throughput,
    "delay-closed-form": task_delay_closed_form, "delay-bvp": task_delay_bvp,
    "simulate": task_simulate, "probe": task_probe, "contour": task_contour,
}


def _load(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}") from None
    return Scenario(parse_scenario(text))


def build_parser():
    ap = argparse.ArgumentParser(prog="relaycoop", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--grid-size", type=int, help="contour/map grid points")
    common.add_argument("--reps", type=int, help="simulation replications")
    common.add_argument("--out", help="output CSV (figure: output directory)")
    common.add_argument("--verbose", "-v", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("run", parents=[common], help="run the task of a scenario file")
    p.add_argument("scenario")
    p = sub.add_parser("compare", parents=[common], help="analytic task vs simulation on a grid")
    p.add_argument("scenario")
    p = sub.add_parser("figure", parents=[common], help="emit figure data and a gnuplot script")
    p.add_argument("id", choices=sorted(FIGURES))
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    where = getattr(args, "scenario", None)
    try:
        if args.cmd == "figure":
            path = write_figure(args.id, args.out or ".")
            print(path)
            return EXIT_OK
        sc = _load(args.scenario)
        out = args.out or sc.get("output", "path") or Path(args.scenario).with_suffix(".csv").name
        if args.cmd == "compare":
            tab, ok = compare(sc, args)
            tab.write(out)
            print(out)
            return EXIT_OK if ok else EXIT_TOLERANCE
        if sc.task == "figure":
            fid = sc.get("task", "figure")
            if fid is None:
                raise ScenarioError("task 'figure' needs a 'figure' key", sc.line("task"))
            print(write_figure(fid, args.out or "."))
            return EXIT_OK
        tab = RUNNERS[sc.task](sc, args)
        tab.write(out)
        print(out)
        return EXIT_OK
    except ScenarioError as e:
        anchor = f"{where}:{e.line}: " if e.line else (f"{where}: " if where else "")
        print(f"error: {anchor}{e}", file=sys.stderr)
        return EXIT_SCHEMA
    except (analysis.InstabilityError, bvp.UnsupportedRegionError, bvp.UnsupportedIndexError,
            kernel.KernelAssumptionError) as e:
        print(f"error: outside the analytic domain: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
