"""Closed-form throughput, stability regions and the symmetric delay formula."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import comb
from scipy.stats import binom

from .model import SystemParams, endogenous_arrivals, relay_rates
from .phy import SuccessProbabilities


class InstabilityError(ValueError):
    """Raised when a formula that needs stable relay queues is used outside the region."""


@dataclass(frozen=True)
class StabilityRegion:
    """Union of two linearly bounded sub-regions in the (lam1, lam2) plane.

    A1/B1: the most relay 1/2 can serve when the other relay is always empty;
    A2/B2: the most it can serve when the other relay is always busy.
    """
    A1: float
    A2: float
    B1: float
    B2: float

    @classmethod
    def from_rates(cls, T, a, b):
        return cls(T * a[0], T * b[0], T * a[1], T * b[1])

    @property
    def convex(self):
        return self.A2 / self.A1 + self.B2 / self.B1 >= 1

    def _constraints(self):
        # each sub-region as rows (g1, g2, h) meaning g . lam < h
        A1, A2, B1, B2 = self.A1, self.A2, self.B1, self.B2
        r1 = [((1.0, (A1 - A2) / B2), A1), ((0.0, 1.0), B2)] if B2 > 0 else [((0.0, 1.0), 0.0)]
        r2 = [(((B1 - B2) / A2, 1.0), B1), ((1.0, 0.0), A2)] if A2 > 0 else [((1.0, 0.0), 0.0)]
        return r1, r2

    def contains(self, lam1, lam2):
        lam = np.array([lam1, lam2])
        if np.any(lam < 0):
            return False
        return any(all(np.dot(g, lam) < h for g, h in sub) for sub in self._constraints())

    def boundary_radius(self, direction, origin=(0.0, 0.0)):
        """Largest s with origin + s*direction on the closure of the region."""
        u = np.asarray(direction, float)
        o = np.asarray(origin, float)
        if np.any(u < 0) or not np.any(u > 0):
            raise ValueError("direction must be nonnegative and nonzero")
        best = 0.0
        for sub in self._constraints():
            s = np.inf
            for g, h in sub:
                slack = h - np.dot(g, o)
                if slack < 0:
                    s = -np.inf
                    break
                gu = np.dot(g, u)
                if gu > 0:
                    s = min(s, slack / gu)
            best = max(best, s)
        return best

    def polygon(self):
        """Vertices of the outer boundary, counter-clockwise."""
        return np.array([[0.0, 0.0], [self.A1, 0.0], [self.A2, self.B2], [0.0, self.B1]])


def stability_region(params: SystemParams, probs: SuccessProbabilities, n_users=2) -> StabilityRegion:
    _, a, b = relay_rates(params, probs)
    if n_users == 2:
        T = (1 - params.t[0]) * (1 - params.t[1])
    else:
        T = (1 - params.t[0]) ** n_users
    return StabilityRegion.from_rates(T, a, b)


def convexity_measure(params: SystemParams, probs: SuccessProbabilities):
    """Left side of the convexity test; the region is convex when it is >= 1."""
    _, a, b = relay_rates(params, probs)
    return float(np.sum(b / a))


def is_convex(params: SystemParams, probs: SuccessProbabilities):
    return convexity_measure(params, probs) >= 1


@dataclass
class ThroughputReport:
    direct: np.ndarray
    relayed: np.ndarray
    lam_end: np.ndarray
    aggregate: float
    stable: bool
    arrivals_dist: np.ndarray | None = None  # [k, relay]: P(k packets enter the relay)

    @property
    def total(self):
        return self.direct + self.relayed


def throughput_two_user(params: SystemParams, probs: SuccessProbabilities, model="stability"):
    t = np.asarray(params.t, float)
    direct = np.array([t[k] * (1 - t[1 - k]) * probs.d_alone[k] + t[k] * t[1 - k] * probs.d_both[k]
                       for k in range(2)])
    lam_end = endogenous_arrivals(params, probs, model)
    if model == "stability":
        relayed = lam_end.sum(1)
    else:
        # duplicate storage: a packet counts once however many relays keep it
        anyof = lambda p: 1 - (1 - p[0]) * (1 - p[1])
        relayed = np.array([
            t[k] * (1 - t[1 - k]) * (1 - probs.d_alone[k]) * anyof(probs.r_alone[k])
            + t[k] * t[1 - k] * (probs.d_none * anyof(probs.r_both[k])
                                 + probs.d_both[1 - k] * anyof(probs.r_other[k]))
            for k in range(2)])
    lam = np.asarray(params.lam_hat) + lam_end.sum(0)
    stable = stability_region(params, probs).contains(*lam)
    agg = float(direct.sum() + relayed.sum() + sum(params.lam_hat))
    return ThroughputReport(direct, relayed, lam_end, agg, stable)


@dataclass
class NUserResult:
    n_users: int
    direct: float  # per user
    lam_u: np.ndarray  # endogenous rate into each relay
    arrivals_dist: np.ndarray  # [k, relay], k = 0..N
    region: StabilityRegion
    stable: bool
    aggregate: float

    @property
    def per_user(self):
        return self.direct + self.lam_u.sum() / self.n_users


def symmetric_n_user(params: SystemParams, probs: SuccessProbabilities, pd, pr, n_users):
    """Throughput and region of N statistically identical sources.

    pd[i-1], pr[i-1]: success at D and at a relay with i active sources.
    Each of the i active packets is stored at relay j independently with
    probability (1-pd) * pr * (1 - pr + pr * p_a[j]).
    """
    if n_users < 1:
        raise ValueError("need at least one user")
    t = params.t[0]
    i = np.arange(1, n_users + 1)
    pd, pr = np.asarray(pd, float)[:n_users], np.asarray(pr, float)[:n_users]
    active = comb(n_users, i) * t ** i * (1 - t) ** (n_users - i)
    direct = float(np.sum(comb(n_users - 1, i - 1) * t ** i * (1 - t) ** (n_users - i) * pd))
    k = np.arange(n_users + 1)
    dist = np.zeros((n_users + 1, 2))
    dist[0] = (1 - t) ** n_users
    for j in range(2):
        pj = (1 - pd) * pr * (1 - pr + pr * params.p_a[0][j])
        dist[:, j] += (active[:, None] * binom.pmf(k[None, :], i[:, None], pj[:, None])).sum(0)
    lam_u = (k[:, None] * dist).sum(0)
    region = stability_region(params, probs, n_users)
    lam = lam_u + np.asarray(params.lam_hat, float)
    agg = n_users * direct + float(lam_u.sum()) + float(sum(params.lam_hat))
    return NUserResult(n_users, direct, lam_u, dist, region, region.contains(*lam), agg)


def instability_onset(params, probs, pd_fn, n_max=40):
    """Smallest N whose relay queues are unstable, or None."""
    for n in range(1, n_max + 1):
        pd, pr = pd_fn(n)
        if not symmetric_n_user(params, probs, pd, pr, n).stable:
            return n
    return None


@dataclass(frozen=True)
class SymmetricDelayInputs:
    lam_hat: float
    t: float
    alpha: float
    alpha_star: float
    q: float
    r: float
    s_bar: float
    s_tilde: float
    s12: float
    q_tilde: float = 0.25


def symmetric_delay_closed_form(p: SymmetricDelayInputs):
    """Mean queue length E and delay D = E / lam of each relay.

    Valid for the fully symmetric capture model; raises InstabilityError when
    T*b <= lam.
    """
    T = (1 - p.t) ** 2
    b = p.alpha * ((1 - p.alpha) * p.s_bar + p.alpha * p.s12)
    a = p.alpha_star * p.s_tilde
    d = b - a
    relayed = p.t * (p.t + 2 * (1 - p.t) * (1 - p.q)) * p.r
    lam = p.lam_hat + relayed
    slack = T * b - lam
    if slack <= 0:
        raise InstabilityError(f"T*b - lam = {slack:.3g} <= 0")
    E = (d * p.lam_hat ** 2 + 2 * b * p.lam_hat + relayed * (2 * b - p.r * d)) / (2 * a * slack)
    return E, (E / lam if lam > 0 else np.nan)
