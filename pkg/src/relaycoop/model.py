"""System parameters and the coefficients derived from them."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .phy import SuccessProbabilities

DIRICHLET_TOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Control parameters of sources and relays.

    p_a[k][j]: probability that a packet of source k decoded by both relays is
    kept by relay j (exclusive storage only).
    storage: 'duplicate' keeps a copy at every relay that decodes (the queueing
    delay model), 'exclusive' keeps at most one copy (the throughput model).
    """
    t: tuple = (0.1, 0.1)
    alpha: tuple = (0.7, 0.7)
    alpha_star: tuple = (1.0, 1.0)
    p_a: tuple = ((0.5, 0.5), (0.5, 0.5))
    lam_hat: tuple = (0.0, 0.0)
    n_users: int = 2
    storage: str = "duplicate"

    def __post_init__(self):
        probs = [*self.t, *self.alpha, *self.alpha_star, *np.ravel(self.p_a)]
        if any(p < 0 or p > 1 for p in probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if any(a_s < a for a, a_s in zip(self.alpha, self.alpha_star)):
            raise ValueError("alpha_star must be >= alpha")
        if any(l < 0 for l in self.lam_hat):
            raise ValueError("exogenous rates must be >= 0")
        if self.storage not in ("duplicate", "exclusive"):
            raise ValueError(f"unknown storage mode {self.storage!r}")
        if self.storage == "exclusive" and any(sum(row) > 1 + 1e-12 for row in self.p_a):
            raise ValueError("exclusive storage needs p_a rows summing to <= 1")
        if self.n_users < 1:
            raise ValueError("need at least one user")

    def swapped(self):
        return replace(self, t=self.t[::-1], alpha=self.alpha[::-1],
                       alpha_star=self.alpha_star[::-1],
                       p_a=tuple(tuple(row[::-1]) for row in self.p_a[::-1]),
                       lam_hat=self.lam_hat[::-1])


@dataclass(frozen=True)
class Coefficients:
    """Everything the kernel and the boundary value problems need.

    T = P(no source transmits); a[i] = departure probability of relay i when it
    is the only busy relay; b[i] = departure probability of relay i when both
    relays are busy; L = (L1, L2, L3) per-slot probabilities that relay 1 only,
    relay 2 only, or both relays store a source packet.
    """
    lam_hat: np.ndarray
    L: np.ndarray
    T: float
    a: np.ndarray
    b: np.ndarray
    delta: np.ndarray | None = None
    alpha_hat: np.ndarray | None = None
    lam_end: np.ndarray | None = None  # [source, relay]

    def __post_init__(self):
        for f in ("lam_hat", "L", "a", "b"):
            object.__setattr__(self, f, np.asarray(getattr(self, f), float))

    @classmethod
    def from_rates(cls, lh1, lh2, L1, L2, L3, T, a1, a2, b1, b2):
        return cls(np.array([lh1, lh2]), np.array([L1, L2, L3]), T, np.array([a1, a2]), np.array([b1, b2]))

    @property
    def d(self):
        return self.b - self.a

    @property
    def lam(self):
        """Total arrival rates of the two relay queues."""
        return self.lam_hat + self.L[[0, 1]] + self.L[2]

    @property
    def rho(self):
        return float(np.sum(self.lam / (self.T * self.a)))

    @property
    def sigma(self):
        return float(np.sum(self.b / self.a))

    def swapped(self):
        s = slice(None, None, -1)
        return Coefficients(
            self.lam_hat[s], self.L[[1, 0, 2]], self.T, self.a[s], self.b[s],
            None if self.delta is None else self.delta[s],
            None if self.alpha_hat is None else self.alpha_hat[s],
            None if self.lam_end is None else self.lam_end[s, s])


def endogenous_arrivals(params: SystemParams, probs: SuccessProbabilities, model="delay"):
    """lam_end[k, j]: rate at which packets of source k enter relay j.

    'delay': duplicate storage with capture at D and at the relays.
    'stability': exclusive storage with the p_a split of doubly decoded packets.
    """
    t = np.asarray(params.t, float)
    lam = np.zeros((2, 2))
    for k in range(2):
        o = 1 - k
        solo = t[k] * (1 - t[o]) * (1 - probs.d_alone[k])
        both = t[k] * t[o]
        for j in range(2):
            m = 1 - j
            if model == "delay":
                lam[k, j] = solo * probs.r_alone[k, j] + both * (
                    probs.d_none * probs.r_both[k, j] + probs.d_both[o] * probs.r_other[k, j])
            elif model == "stability":
                pa = params.p_a[k][j]
                ra, rb = probs.r_alone[k], probs.r_both[k]
                lam[k, j] = solo * ra[j] * (1 - ra[m] + ra[m] * pa) \
                    + both * (1 - probs.d_both[k]) * rb[j] * (1 - rb[m] + rb[m] * pa)
            else:
                raise ValueError(f"unknown model {model!r}")
    return lam


def storage_rates(params: SystemParams, probs: SuccessProbabilities):
    """(L1, L2, L3) of the duplicate-storage capture model."""
    t1, t2 = params.t
    L = np.zeros(3)

    def add(w, p1, p2):
        # relays decode independently with probabilities p1, p2
        L[0] += w * p1 * (1 - p2)
        L[1] += w * (1 - p1) * p2
        L[2] += w * p1 * p2

    for k, w in ((0, t1 * (1 - t2)), (1, t2 * (1 - t1))):
        add(w * (1 - probs.d_alone[k]), *probs.r_alone[k])
    both = t1 * t2
    add(both * probs.d_none, *probs.r_both.sum(0))
    add(both * probs.d_both[0], *probs.r_other[1])
    add(both * probs.d_both[1], *probs.r_other[0])
    return L


def relay_rates(params: SystemParams, probs: SuccessProbabilities):
    """alpha_hat, a and b of the two relays.

    alpha_hat[i] is the success probability of relay i when it transmits while
    the other relay is busy (the other one transmits with its alpha).
    """
    al, al_s = np.asarray(params.alpha, float), np.asarray(params.alpha_star, float)
    other = al[::-1]
    alpha_hat = (1 - other) * probs.relay + other * probs.relay_both
    return alpha_hat, al_s * probs.relay_star, al * alpha_hat


def derive_coefficients(params: SystemParams, probs: SuccessProbabilities, model=None) -> Coefficients:
    if model is None:
        model = "delay" if params.storage == "duplicate" else "stability"
    T = (1 - params.t[0]) * (1 - params.t[1])
    alpha_hat, a, b = relay_rates(params, probs)
    lam_end = endogenous_arrivals(params, probs, model)
    if model == "delay":
        L = storage_rates(params, probs)
    else:
        # exclusive storage: no joint storage, one relay per packet
        L = np.array([lam_end[:, 0].sum(), lam_end[:, 1].sum(), 0.0])
    return Coefficients(np.asarray(params.lam_hat, float), L, T, a, b,
                        probs.relay_both - probs.relay, alpha_hat, lam_end)


def service_rates(params: SystemParams, probs: SuccessProbabilities, empty_probs, n_users=2):
    """Service rates of the relays given Pr(N_2 = 0) and Pr(N_1 = 0)."""
    _, a, b = relay_rates(params, probs)
    p2_empty, p1_empty = empty_probs
    quiet = np.prod(1 - np.asarray(params.t, float)) if n_users == 2 else (1 - params.t[0]) ** n_users
    mu1 = quiet * (p2_empty * a[0] + (1 - p2_empty) * b[0])
    mu2 = quiet * (p1_empty * a[1] + (1 - p1_empty) * b[1])
    return mu1, mu2


@dataclass(frozen=True)
class CaseInfo:
    kind: str  # 'dirichlet' or 'rh'
    sigma: float
    h00: float | None = None  # known in closed form only in the Dirichlet case

    def boundary_from_h00(self, c: Coefficients, h00):
        """H(1,0), H(0,1) from H(0,0) through the two conservation relations."""
        if self.kind == "dirichlet":
            raise ValueError("conservation relations are degenerate when sigma = 1")
        return boundary_from_h00(c, h00)


def boundary_from_h00(c: Coefficients, h00):
    T, (a1, a2), (b1, b2), (d1, d2), (l1, l2) = c.T, c.a, c.b, c.d, c.lam
    den = T * (b1 * b2 - d1 * d2)
    h10 = (d2 * l1 + b1 * (T * a2 - l2) + T * d2 * a1 * h00) / den
    h01 = (d1 * l2 + b2 * (T * a1 - l1) + T * d1 * a2 * h00) / den
    return h10, h01


def conservation_residuals(c: Coefficients, h00, h10, h01):
    """Residuals of the two flow-conservation identities."""
    T, (b1, b2), (d1, d2), (l1, l2) = c.T, c.b, c.d, c.lam
    r1 = l1 - T * (b1 * (1 - h01) - d1 * (h10 - h00))
    r2 = l2 - T * (b2 * (1 - h10) - d2 * (h01 - h00))
    return r1, r2


def classify_case(c: Coefficients, tol=DIRICHLET_TOL) -> CaseInfo:
    s = c.sigma
    if abs(s - 1) <= tol:
        return CaseInfo("dirichlet", s, 1 - c.rho)
    return CaseInfo("rh", s)
