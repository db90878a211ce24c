"""Link success probabilities under Rayleigh fading with an SINR threshold."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class LinkSpec:
    tx_power_w: float
    distance_m: float
    pathloss_exponent: float = 4.0
    interferers: tuple = ()  # (tx_power_w, distance_m) pairs

    def __post_init__(self):
        if self.tx_power_w <= 0 or self.distance_m <= 0 or self.pathloss_exponent <= 0:
            raise ValueError("link power, distance and path-loss exponent must be positive")
        for p, d in self.interferers:
            if p <= 0 or d <= 0:
                raise ValueError("interferer power and distance must be positive")


@dataclass(frozen=True)
class PhyEnvironment:
    noise_w: float
    threshold: float

    def __post_init__(self):
        if self.noise_w < 0 or self.threshold <= 0:
            raise ValueError("noise must be >= 0 and threshold > 0")


def rayleigh_success(link: LinkSpec, env: PhyEnvironment) -> float:
    """P(SINR >= threshold) for Rayleigh fading on every link.

    Noise gives exp(-g*nu*d^a/P); each interferer j contributes a factor
    1/(1 + g*(P_j d_j^-a)/(P d^-a)).
    """
    g, a = env.threshold, link.pathloss_exponent
    rx = link.tx_power_w * link.distance_m ** (-a)
    p = np.exp(-g * env.noise_w / rx)
    for pj, dj in link.interferers:
        p /= 1.0 + g * pj * dj ** (-a) / rx
    return float(p)


def calibrate_noise(target: float, link: LinkSpec, threshold: float) -> float:
    """Noise power that makes an interference-free link succeed with `target`."""
    if not 0.0 < target < 1.0:
        raise ValueError("target must lie in (0, 1)")
    if link.interferers:
        raise ValueError("calibration link must be interference free")
    return -np.log(target) * link.tx_power_w / (threshold * link.distance_m ** link.pathloss_exponent)


@dataclass(frozen=True)
class Geometry:
    """Distances and powers of the two-source, two-relay layout.

    user_relay_m[k][i] is the distance from source k to relay i.
    relay_solo_power_w is what a relay uses when the other relay is empty
    (None means the same power as usual).
    """
    user_dest_m: tuple = (110.0, 110.0)
    user_relay_m: tuple = ((80.0, 80.0), (80.0, 80.0))
    relay_dest_m: tuple = (80.0, 80.0)
    user_power_w: tuple = (1e-3, 1e-3)
    relay_power_w: tuple = (1e-2, 1e-2)
    relay_solo_power_w: tuple | None = None
    exponent: float = 4.0


REFERENCE_GEOMETRY = Geometry()
CALIBRATION_TARGET = 0.74  # direct-link success at threshold 0.2
CALIBRATION_THRESHOLD = 0.2


def reference_noise(geom: Geometry = REFERENCE_GEOMETRY) -> float:
    link = LinkSpec(geom.user_power_w[0], geom.user_dest_m[0], geom.exponent)
    return calibrate_noise(CALIBRATION_TARGET, link, CALIBRATION_THRESHOLD)


@dataclass
class SuccessProbabilities:
    """Every reception probability the two-source model consumes.

    Index k is the source, i the relay.
      d_alone[k]    source k -> D, k alone
      d_both[k]     source k -> D, both sources active
      r_alone[k,i]  source k -> relay i, k alone
      r_both[k,i]   source k -> relay i, both active
      r_other[k,i]  source k -> relay i, both active and the other packet reached D
      relay[i]      relay i -> D, other relay non-empty but silent
      relay_star[i] relay i -> D, other relay empty
      relay_both[i] relay i -> D, both relays transmit
    With capture=True the joint masses satisfy the at-most-one-decode rule:
    d_both.sum() <= 1, r_both[:, i].sum() <= 1 and relay_both.sum() <= 1.
    """
    d_alone: np.ndarray
    d_both: np.ndarray
    r_alone: np.ndarray
    r_both: np.ndarray
    r_other: np.ndarray
    relay: np.ndarray
    relay_star: np.ndarray
    relay_both: np.ndarray
    capture: bool = False

    def __post_init__(self):
        for f in ("d_alone", "d_both", "relay", "relay_star", "relay_both"):
            setattr(self, f, np.asarray(getattr(self, f), float).reshape(2))
        for f in ("r_alone", "r_both", "r_other"):
            setattr(self, f, np.asarray(getattr(self, f), float).reshape(2, 2))

    def arrays(self):
        return [self.d_alone, self.d_both, self.r_alone, self.r_both, self.r_other,
                self.relay, self.relay_star, self.relay_both]

    def check(self, tol=1e-12):
        for a in self.arrays():
            if np.any(a < -tol) or np.any(a > 1 + tol):
                raise ValueError("success probabilities must lie in [0, 1]")
        if self.capture:
            if self.d_both.sum() > 1 + tol or np.any(self.r_both.sum(0) > 1 + tol) \
                    or self.relay_both.sum() > 1 + tol:
                raise ValueError("capture masses exceed one")
        return self

    @property
    def d_none(self):
        """No source decoded at D when both transmit (capture channel)."""
        return 1.0 - self.d_both.sum()

    @property
    def r_none(self):
        """Relay i decodes neither packet when both transmit (capture channel)."""
        return 1.0 - self.r_both.sum(0)

    def swapped(self):
        """Exchange the labels of sources 1<->2 and relays 1<->2."""
        s = slice(None, None, -1)
        return replace(self, d_alone=self.d_alone[s], d_both=self.d_both[s],
                       r_alone=self.r_alone[s, s], r_both=self.r_both[s, s],
                       r_other=self.r_other[s, s], relay=self.relay[s],
                       relay_star=self.relay_star[s], relay_both=self.relay_both[s])


def capture_split(p1, p2):
    """Turn two independent decode probabilities into capture masses.

    The 'decoded both' mass p1*p2 is shared equally between the two
    single-decode outcomes.
    """
    both = p1 * p2
    return p1 - both / 2, p2 - both / 2


def build_success_matrix(geom: Geometry, env: PhyEnvironment, capture=False) -> SuccessProbabilities:
    a = geom.exponent
    up, rp = geom.user_power_w, geom.relay_power_w
    solo = geom.relay_solo_power_w or rp
    ps = lambda p, d, intf=(): rayleigh_success(LinkSpec(p, d, a, tuple(intf)), env)

    d_alone = np.array([ps(up[k], geom.user_dest_m[k]) for k in range(2)])
    d_both = np.array([ps(up[k], geom.user_dest_m[k], [(up[1 - k], geom.user_dest_m[1 - k])])
                       for k in range(2)])
    r_alone = np.array([[ps(up[k], geom.user_relay_m[k][i]) for i in range(2)] for k in range(2)])
    r_both = np.array([[ps(up[k], geom.user_relay_m[k][i], [(up[1 - k], geom.user_relay_m[1 - k][i])])
                        for i in range(2)] for k in range(2)])
    relay = np.array([ps(rp[i], geom.relay_dest_m[i]) for i in range(2)])
    relay_star = np.array([ps(solo[i], geom.relay_dest_m[i]) for i in range(2)])
    relay_both = np.array([ps(rp[i], geom.relay_dest_m[i], [(rp[1 - i], geom.relay_dest_m[1 - i])])
                           for i in range(2)])
    r_other = r_both.copy()
    if capture:
        d_both = np.array(capture_split(*d_both))
        relay_both = np.array(capture_split(*relay_both))
        for i in range(2):
            r_both[:, i] = capture_split(r_both[0, i], r_both[1, i])
    return SuccessProbabilities(d_alone, d_both, r_alone, r_both, r_other,
                                relay, relay_star, relay_both, capture).check()


def reference_table(threshold: float, geom: Geometry = REFERENCE_GEOMETRY, noise_w=None):
    """The four headline probabilities of the symmetric reference layout."""
    env = PhyEnvironment(reference_noise(geom) if noise_w is None else noise_w, threshold)
    sp = build_success_matrix(geom, env)
    return {"direct": sp.d_alone[0], "user_relay": sp.r_alone[0, 0],
            "relay_alone": sp.relay[0], "relay_both": sp.relay_both[0]}


def n_user_success(geom: Geometry, env: PhyEnvironment, n_users: int):
    """P_s(D, i) and P_s(R_j, i) for i = 1..N active symmetric users.

    The i-1 other active users sit at the same distances and interfere.
    Returns arrays indexed by i-1.
    """
    if n_users < 1:
        raise ValueError("need at least one user")
    a, p = geom.exponent, geom.user_power_w[0]
    dd, dr = geom.user_dest_m[0], geom.user_relay_m[0][0]
    pd = np.array([rayleigh_success(LinkSpec(p, dd, a, ((p, dd),) * (i - 1)), env)
                   for i in range(1, n_users + 1)])
    pr = np.array([rayleigh_success(LinkSpec(p, dr, a, ((p, dr),) * (i - 1)), env)
                   for i in range(1, n_users + 1)])
    return pd, pr


def symmetric_capture_probs(q, q_tilde, r, s_bar, s_tilde, s12) -> SuccessProbabilities:
    """Capture-channel probabilities of the fully symmetric delay model.

    q: direct success alone, q_tilde: direct success of each source when both
    transmit, r: a relay decodes a failed packet, s_bar/s_tilde/s12: relay to
    D with the other relay busy / empty / transmitting.
    """
    full = np.full((2, 2), r)
    return SuccessProbabilities(
        d_alone=[q, q], d_both=[q_tilde, q_tilde], r_alone=full, r_both=full / 2,
        r_other=full, relay=[s_bar, s_bar], relay_star=[s_tilde, s_tilde],
        relay_both=[s12, s12], capture=True).check()
