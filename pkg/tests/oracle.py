"""Stationary law of the duplicate-storage relay chain on a truncated lattice.

Built straight from the slot-level event description (who transmits, who
decodes, who captures), so it shares no formulas with the package.
"""
import itertools

import numpy as np
from scipy.signal import lfilter
from scipy.sparse.linalg import LinearOperator, gmres


def _source_increments(params, probs):
    """{(s1, s2): prob} of packets stored at the relays in one slot."""
    t1, t2 = params.t
    out = {}

    def add(k, p):
        out[k] = out.get(k, 0.0) + p

    def independent(p1, p2, w):
        for g1, g2 in itertools.product((0, 1), repeat=2):
            add((g1, g2), w * (p1 if g1 else 1 - p1) * (p2 if g2 else 1 - p2))

    add((0, 0), (1 - t1) * (1 - t2))
    for k, w in ((0, t1 * (1 - t2)), (1, t2 * (1 - t1))):
        add((0, 0), w * probs.d_alone[k])
        independent(*probs.r_alone[k], w * (1 - probs.d_alone[k]))
    both = t1 * t2
    for win in (0, 1):
        # the other source's packet may still be picked up by the relays
        independent(*probs.r_other[1 - win], both * probs.d_both[win])
    independent(*probs.r_both.sum(0), both * (1 - probs.d_both.sum()))
    return out


def _relay_departures(params, probs, busy1, busy2):
    """{(d1, d2): prob} of relay departures in a slot with silent sources."""
    a1, a2 = params.alpha
    if busy1 and busy2:
        both = a1 * a2
        return {(1, 0): both * probs.relay_both[0] + a1 * (1 - a2) * probs.relay[0],
                (0, 1): both * probs.relay_both[1] + a2 * (1 - a1) * probs.relay[1],
                (0, 0): 1 - both * probs.relay_both.sum() - a1 * (1 - a2) * probs.relay[0]
                - a2 * (1 - a1) * probs.relay[1]}
    if busy1:
        p = params.alpha_star[0] * probs.relay_star[0]
        return {(1, 0): p, (0, 0): 1 - p}
    if busy2:
        p = params.alpha_star[1] * probs.relay_star[1]
        return {(0, 1): p, (0, 0): 1 - p}
    return {(0, 0): 1.0}


def one_step(params, probs, K):
    """Linear map P -> law after one slot, on flattened K x K arrays (overflow dropped)."""
    quiet = (1 - params.t[0]) * (1 - params.t[1])
    inc = _source_increments(params, probs)
    inc[(0, 0)] -= quiet  # silent slots are handled with the departures
    n = np.arange(K)
    b1 = (n > 0)[:, None] & np.ones(K, bool)
    b2 = np.ones(K, bool)[:, None] & (n > 0)[None, :]
    masks = {busy: (b1 == busy[0]) & (b2 == busy[1]) for busy in itertools.product((False, True), repeat=2)}
    deps = {busy: _relay_departures(params, probs, *busy) for busy in masks}
    p1, p2 = (lh / (1 + lh) for lh in params.lam_hat)

    def apply(v):
        P = np.asarray(v, float).reshape(K, K)
        Q = np.zeros_like(P)
        for (s1, s2), w in inc.items():
            Q[s1:, s2:] += w * P[:K - s1, :K - s2]
        for busy, m in masks.items():
            Pm = np.where(m, P, 0.0) * quiet
            for (d1, d2), w in deps[busy].items():
                Q[:K - d1, :K - d2] += w * Pm[d1:, d2:]
        # geometric exogenous arrivals, P(k) = (1 - p) p^k
        Q = lfilter([1 - p1], [1, -p1], Q, axis=0)
        Q = lfilter([1 - p2], [1, -p2], Q, axis=1)
        return Q.ravel()

    return apply


def stationary(params, probs, K=160, tol=1e-14, polish=2000):
    """P[n1, n2] on {0..K-1}^2.

    GMRES on pi - A pi + e0 sum(pi) = e0, which forces sum(pi) = 1 when A
    conserves mass, then a few power steps.
    """
    A = one_step(params, probs, K)
    e0 = np.zeros(K * K)
    e0[0] = 1.0
    op = LinearOperator((K * K, K * K), dtype=float, matvec=lambda v: v - A(v) + e0 * v.sum())
    x, info = gmres(op, e0, rtol=1e-14, atol=0, restart=200, maxiter=200)
    x = np.maximum(x, 0)
    x /= x.sum()
    for _ in range(polish):
        y = A(x)
        y /= y.sum()
        done = np.abs(y - x).sum() < tol
        x = y
        if done:
            break
    return x.reshape(K, K)


def summary(P):
    n = np.arange(P.shape[0])
    return {"h00": P[0, 0], "h10": P[:, 0].sum(), "h01": P[0, :].sum(),
            "E1": n @ P.sum(1), "E2": n @ P.sum(0), "tail": P[-5:, :].sum() + P[:, -5:].sum()}
