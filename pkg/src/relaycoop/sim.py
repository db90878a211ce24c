"""Slot-level Monte Carlo simulator of the two-relay network.

Each slot: sources transmit, the destination and the relays decode, relays
store; if every source is silent the non-empty relays transmit instead.
Exogenous relay traffic arrives after service.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit
from scipy import stats

from .model import SystemParams
from .phy import SuccessProbabilities

DELAY, STABILITY, N_USER = 0, 1, 2
MODES = {"delay": DELAY, "stability": STABILITY, "n_user": N_USER}
DRIFT_THRESHOLD = 1e-3

# counter layout
C_DIRECT, C_RELAYED, C_ENDO, C_EXO, C_DEP, C_PATTERN = 0, 2, 4, 6, 8, 10
N_COUNTERS = 14


@dataclass
class SimConfig:
    params: SystemParams
    probs: SuccessProbabilities
    horizon: int = 1_000_000
    warmup: int = 10_000
    replications: int = 1
    seed: int = 0
    mode: str = "delay"
    n_users: int = 2
    pd: np.ndarray | None = None  # n_user mode: success at D with i active, index i-1
    pr: np.ndarray | None = None  # n_user mode: success at a relay with i active
    batches: int = 20
    trace_points: int = 2048

    def __post_init__(self):
        if not self.horizon > self.warmup >= 0:
            raise ValueError("need horizon > warmup >= 0")
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "n_user" and (self.pd is None or self.pr is None
                                      or len(self.pd) < self.n_users or len(self.pr) < self.n_users):
            raise ValueError("n_user mode needs pd and pr for 1..n_users active sources")


def _pack(cfg: SimConfig):
    p, s = cfg.params, cfg.probs
    f = lambda v: np.ascontiguousarray(np.asarray(v, float))
    pd = f(cfg.pd if cfg.pd is not None else [0.0])
    pr = f(cfg.pr if cfg.pr is not None else [0.0])
    return (f(p.t), f(p.alpha), f(p.alpha_star), f(p.lam_hat), f(s.d_alone), f(s.d_both),
            f(s.r_alone), f(s.r_both), f(s.r_other), f(s.relay), f(s.relay_star), f(s.relay_both),
            f(p.p_a), pd, pr, cfg.n_users)


@njit(nogil=True, cache=True)
def _keep(g1, g2, p1, p2, rng):
    """Relay that keeps a packet (1, 2) or 0 if none; a doubly decoded packet is split by p_a."""
    if g1 and g2:
        u = rng.random()
        if u < p1:
            return 1
        if u < p1 + p2:
            return 2
        return 0
    if g1:
        return 1
    if g2:
        return 2
    return 0


@njit(nogil=True, cache=True)
def _geometric(lh, rng):
    if lh <= 0.0:
        return 0
    return int(math.floor(math.log(1.0 - rng.random()) / math.log(lh / (1.0 + lh))))


@njit(nogil=True, cache=True)
def _slot(n1, n2, P, mode, rng, cnt):
    t, al, als, lh, dA, dB, rA, rB, rO, rel, rels, relb, pa, pd, prr, nusers = P
    s1 = 0
    s2 = 0
    active = False
    if mode == N_USER:
        k = 0
        for _ in range(nusers):
            if rng.random() < t[0]:
                k += 1
        active = k > 0
        for _ in range(k):
            if rng.random() < pd[k - 1]:
                cnt[C_DIRECT] += 1
            else:
                j = _keep(rng.random() < prr[k - 1], rng.random() < prr[k - 1], pa[0, 0], pa[0, 1], rng)
                if j > 0:
                    cnt[C_RELAYED] += 1
                    if j == 1:
                        s1 += 1
                    else:
                        s2 += 1
    else:
        tx1 = rng.random() < t[0]
        tx2 = rng.random() < t[1]
        active = tx1 or tx2
        if active and not (tx1 and tx2):
            k = 0 if tx1 else 1
            if rng.random() < dA[k]:
                cnt[C_DIRECT + k] += 1
            else:
                g1 = rng.random() < rA[k, 0]
                g2 = rng.random() < rA[k, 1]
                if mode == DELAY:
                    s1 += g1
                    s2 += g2
                    if g1 or g2:
                        cnt[C_RELAYED + k] += 1
                else:
                    j = _keep(g1, g2, pa[k, 0], pa[k, 1], rng)
                    if j > 0:
                        cnt[C_RELAYED + k] += 1
                        if j == 1:
                            s1 += 1
                        else:
                            s2 += 1
        elif active and mode == DELAY:
            # capture: at most one packet decoded per receiver
            u = rng.random()
            win = 0 if u < dB[0] else (1 if u < dB[0] + dB[1] else -1)
            if win >= 0:
                cnt[C_DIRECT + win] += 1
                o = 1 - win
                g1 = rng.random() < rO[o, 0]
                g2 = rng.random() < rO[o, 1]
                s1 += g1
                s2 += g2
                if g1 or g2:
                    cnt[C_RELAYED + o] += 1
            else:
                got0 = False
                got1 = False
                for i in range(2):
                    u = rng.random()
                    who = 0 if u < rB[0, i] else (1 if u < rB[0, i] + rB[1, i] else -1)
                    if who >= 0:
                        if i == 0:
                            s1 += 1
                        else:
                            s2 += 1
                        if who == 0:
                            got0 = True
                        else:
                            got1 = True
                cnt[C_RELAYED] += got0
                cnt[C_RELAYED + 1] += got1
        elif active:
            for k in range(2):
                if rng.random() < dB[k]:
                    cnt[C_DIRECT + k] += 1
                else:
                    j = _keep(rng.random() < rB[k, 0], rng.random() < rB[k, 1], pa[k, 0], pa[k, 1], rng)
                    if j > 0:
                        cnt[C_RELAYED + k] += 1
                        if j == 1:
                            s1 += 1
                        else:
                            s2 += 1
    dep1 = False
    dep2 = False
    if not active:
        if n1 > 0 and n2 > 0:
            x1 = rng.random() < al[0]
            x2 = rng.random() < al[1]
            if x1 and x2:
                if mode == DELAY:
                    u = rng.random()
                    dep1 = u < relb[0]
                    dep2 = (not dep1) and u < relb[0] + relb[1]
                else:
                    dep1 = rng.random() < relb[0]
                    dep2 = rng.random() < relb[1]
            elif x1:
                dep1 = rng.random() < rel[0]
            elif x2:
                dep2 = rng.random() < rel[1]
        elif n1 > 0:
            dep1 = rng.random() < als[0] and rng.random() < rels[0]
        elif n2 > 0:
            dep2 = rng.random() < als[1] and rng.random() < rels[1]
    a1 = _geometric(lh[0], rng)
    a2 = _geometric(lh[1], rng)
    cnt[C_ENDO] += s1
    cnt[C_ENDO + 1] += s2
    cnt[C_EXO] += a1
    cnt[C_EXO + 1] += a2
    cnt[C_DEP] += dep1
    cnt[C_DEP + 1] += dep2
    cnt[C_PATTERN + (s1 > 0) + 2 * (s2 > 0)] += 1
    return n1 - dep1 + s1 + a1, n2 - dep2 + s2 + a2


@njit(nogil=True, cache=True)
def _run(P, mode, rng, horizon, warmup, nb, stride, cnt, bcnt, barea, bempty, trace):
    n1 = 0
    n2 = 0
    span = horizon - warmup
    tmp = np.zeros(N_COUNTERS, np.int64)
    for s in range(horizon):
        tmp[:] = 0
        n1, n2 = _slot(n1, n2, P, mode, rng, tmp)
        cnt += tmp
        if s >= warmup:
            b = (s - warmup) * nb // span
            bcnt[b] += tmp
            barea[b, 0] += n1
            barea[b, 1] += n2
            bempty[b, 0] += n1 == 0
            bempty[b, 1] += n2 == 0
            bempty[b, 2] += n1 == 0 and n2 == 0
        if s % stride == 0:
            k = s // stride
            if k < trace.shape[0]:
                trace[k, 0] = n1
                trace[k, 1] = n2
    return n1, n2


@dataclass
class Replication:
    counters: np.ndarray  # whole run, warmup included
    batch_counters: np.ndarray  # [batch, counter] after warmup
    batch_area: np.ndarray
    batch_empty: np.ndarray
    batch_slots: np.ndarray
    final: tuple
    trace: np.ndarray
    stride: int

    @property
    def conserved(self):
        c = self.counters
        inflow = c[C_ENDO:C_ENDO + 2] + c[C_EXO:C_EXO + 2]
        return bool(np.all(inflow == c[C_DEP:C_DEP + 2] + np.asarray(self.final)))

    def drift(self):
        """Least-squares slope (packets/slot) of both queues over the second half."""
        t = np.arange(len(self.trace)) * self.stride
        h = len(t) // 2
        tt = t[h:] - t[h:].mean()
        return (tt @ (self.trace[h:] - self.trace[h:].mean(0))) / (tt @ tt)


def replicate(cfg: SimConfig, rng: np.random.Generator) -> Replication:
    nb = cfg.batches
    stride = max(1, cfg.horizon // cfg.trace_points)
    npts = (cfg.horizon - 1) // stride + 1
    cnt = np.zeros(N_COUNTERS, np.int64)
    bcnt = np.zeros((nb, N_COUNTERS), np.int64)
    barea = np.zeros((nb, 2), np.int64)
    bempty = np.zeros((nb, 3), np.int64)
    trace = np.zeros((npts, 2), np.int64)
    final = _run(_pack(cfg), MODES[cfg.mode], rng, cfg.horizon, cfg.warmup, nb, stride,
                 cnt, bcnt, barea, bempty, trace)
    span = cfg.horizon - cfg.warmup
    bslots = np.diff(np.ceil(np.arange(nb + 1) * span / nb)).astype(np.int64)
    return Replication(cnt, bcnt, barea, bempty, bslots, final, trace.astype(float), stride)


@dataclass
class SimStats:
    E: np.ndarray  # time-average queue length per relay
    lam: np.ndarray  # measured arrival rate per relay
    D: np.ndarray  # Little delay per relay (slots)
    p_empty: np.ndarray  # Pr(N_1 = 0), Pr(N_2 = 0)
    p_both_empty: float
    thr_direct: np.ndarray  # per user (n_user mode: all users together)
    thr_relayed: np.ndarray
    storage_freq: np.ndarray  # per-slot frequency: no store, relay 1 only, relay 2 only, both
    ci: dict  # 95% half-widths, same keys as the estimates
    drift: np.ndarray  # [rep, relay]
    conserved: bool
    replications: list = field(repr=False, default_factory=list)

    @property
    def thr_total(self):
        return self.thr_direct + self.thr_relayed

    @property
    def unstable_fraction(self):
        return float(np.mean(np.any(self.drift > DRIFT_THRESHOLD, axis=1)))

    @property
    def unstable(self):
        return self.unstable_fraction > 0.5


def _estimates(cnt, area, empty, slots):
    """Point estimates from summed counters over `slots` slots."""
    lam = (cnt[C_ENDO:C_ENDO + 2] + cnt[C_EXO:C_EXO + 2]) / slots
    E = area / slots
    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.where(lam > 0, E / lam, np.nan)
    return {
        "E": E, "lam": lam, "D": D,
        "p_empty": empty[:2] / slots, "p_both_empty": np.array([empty[2] / slots]),
        "thr_direct": cnt[C_DIRECT:C_DIRECT + 2] / slots,
        "thr_relayed": cnt[C_RELAYED:C_RELAYED + 2] / slots,
        "storage_freq": cnt[C_PATTERN:C_PATTERN + 4] / slots,
    }


def _fsum_axis0(rows):
    return np.array([math.fsum(col) for col in np.asarray(rows, float).T])


def aggregate(reps: list[Replication]) -> SimStats:
    if len(reps) == 1:
        r = reps[0]
        units = [_estimates(r.batch_counters[b], r.batch_area[b], r.batch_empty[b], r.batch_slots[b])
                 for b in range(len(r.batch_slots))]
    else:
        units = [_estimates(r.batch_counters.sum(0), r.batch_area.sum(0), r.batch_empty.sum(0),
                            r.batch_slots.sum()) for r in reps]
    # point estimates pool every measured slot
    slots = sum(int(r.batch_slots.sum()) for r in reps)
    pooled = _estimates(_fsum_axis0([r.batch_counters.sum(0) for r in reps]),
                        _fsum_axis0([r.batch_area.sum(0) for r in reps]),
                        _fsum_axis0([r.batch_empty.sum(0) for r in reps]), slots)
    n = len(units)
    tq = stats.t.ppf(0.975, n - 1)
    ci = {k: tq * np.std([u[k] for u in units], axis=0, ddof=1) / np.sqrt(n) for k in pooled}
    return SimStats(pooled["E"], pooled["lam"], pooled["D"], pooled["p_empty"],
                    float(pooled["p_both_empty"][0]), pooled["thr_direct"], pooled["thr_relayed"],
                    pooled["storage_freq"], ci, np.array([r.drift() for r in reps]),
                    all(r.conserved for r in reps), reps)


def run(cfg: SimConfig, workers=None) -> SimStats:
    """Independent replications (one Generator each, spawned from cfg.seed) in a thread pool."""
    gens = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.replications)]
    workers = workers or min(cfg.replications, os.cpu_count() or 1)
    if workers == 1:
        reps = [replicate(cfg, g) for g in gens]
    else:
        with ThreadPoolExecutor(workers) as ex:
            reps = list(ex.map(lambda g: replicate(cfg, g), gens))
    return aggregate(reps)


@dataclass
class SimState:
    n1: int = 0
    n2: int = 0


def step(state: SimState, cfg: SimConfig, rng: np.random.Generator, counters=None) -> SimState:
    """Advance one slot."""
    cnt = np.zeros(N_COUNTERS, np.int64) if counters is None else counters
    n1, n2 = _slot(state.n1, state.n2, _pack(cfg), MODES[cfg.mode], rng, cnt)
    return SimState(int(n1), int(n2))


@njit(nogil=True, cache=True)
def _transitions(n1, n2, P, mode, rng, n, out, off):
    cnt = np.zeros(N_COUNTERS, np.int64)
    for _ in range(n):
        m1, m2 = _slot(n1, n2, P, mode, rng, cnt)
        out[m1 - n1 + off, m2 - n2 + off] += 1


def transition_sample(cfg: SimConfig, state: SimState, n: int, seed=0, span=6):
    """Counts of one-slot increments (dN1, dN2) from `state`, indexed [dN1 + span, dN2 + span]."""
    out = np.zeros((2 * span + 1, 2 * span + 1), np.int64)
    _transitions(state.n1, state.n2, _pack(cfg), MODES[cfg.mode], np.random.default_rng(seed), n, out, span)
    return out


def region_probe(cfg: SimConfig, direction, hi=None, rel_tol=0.02, max_doublings=12):
    """Empirical stability boundary along `direction` in the exogenous-rate plane.

    Bisects on the scale s of lam_hat = s * u (u = direction / |direction|);
    each point is classified by the majority drift test over cfg.replications.
    Returns the boundary scale.
    """
    u = np.asarray(direction, float)
    if u.shape != (2,) or np.any(u < 0) or not np.any(u > 0):
        raise ValueError("direction must be nonnegative and nonzero")
    u = u / np.linalg.norm(u)

    def unstable(s):
        p = cfg.params
        return run(replace(cfg, params=replace(p, lam_hat=tuple(s * u)))).unstable

    lo = 0.0
    hi = hi or 0.05
    for _ in range(max_doublings):
        if unstable(hi):
            break
        lo, hi = hi, 2 * hi
    else:
        return np.inf
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if unstable(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def write_csv(st: SimStats, path):
    """Per-replication rows followed by the pooled row."""
    keys = ["E", "lam", "D", "p_empty", "thr_direct", "thr_relayed"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["replication"] + [f"{k}_{i}" for k in keys for i in (1, 2)]
                   + ["p_both_empty", "drift_1", "drift_2"])
        for i, r in enumerate(st.replications):
            e = _estimates(r.batch_counters.sum(0), r.batch_area.sum(0), r.batch_empty.sum(0),
                           r.batch_slots.sum())
            w.writerow([i] + [repr(float(v)) for k in keys for v in e[k]]
                       + [repr(float(e["p_both_empty"][0]))] + [repr(float(v)) for v in r.drift()])
        w.writerow(["pooled"] + [repr(float(v)) for k in keys for v in getattr(st, k)]
                   + [repr(st.p_both_empty), "", ""])
