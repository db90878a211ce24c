"""Named parameter sets used by the figures, scripts and acceptance tests."""
from __future__ import annotations

import numpy as np

from .analysis import SymmetricDelayInputs
from .model import SystemParams
from .phy import (REFERENCE_GEOMETRY, PhyEnvironment, SuccessProbabilities, build_success_matrix,
                  n_user_success, reference_noise, symmetric_capture_probs)

# symmetric delay family: direct success, relay->D busy/alone/both
DELAY_FAMILY = dict(q=0.5, s_bar=0.8, s_tilde=0.9, s12=0.4, q_tilde=0.25)


def symmetric_delay_inputs(alpha=0.7, lam_hat=0.1, r=0.9, t=0.1, alpha_star=1.0, **kw):
    return SymmetricDelayInputs(lam_hat=lam_hat, t=t, alpha=alpha, alpha_star=alpha_star,
                                **{**DELAY_FAMILY, "r": r, **kw})


def symmetric_system(s: SymmetricDelayInputs):
    """(SystemParams, SuccessProbabilities) of a symmetric capture-channel system."""
    probs = symmetric_capture_probs(s.q, s.q_tilde, s.r, s.s_bar, s.s_tilde, s.s12)
    params = SystemParams(t=(s.t, s.t), alpha=(s.alpha, s.alpha),
                          alpha_star=(s.alpha_star, s.alpha_star), lam_hat=(s.lam_hat, s.lam_hat))
    return params, probs


def asymmetric_system(t1=0.2, alpha1_star=0.9, lam_hat=(0.0, 0.0), storage="duplicate"):
    """Asymmetric two-relay set: relays differ in alpha and alpha_star, sources in t.

    Relay links: 0.9 alone, 0.8 with the other relay busy but silent, 0.4 each
    when both transmit. Source links: 0.5 direct alone, 0.25 each under
    capture, 0.4 to each relay (0.2 each under capture).
    """
    r = 0.4
    probs = SuccessProbabilities(
        d_alone=[0.5, 0.5], d_both=[0.25, 0.25], r_alone=np.full((2, 2), r),
        r_both=np.full((2, 2), r / 2), r_other=np.full((2, 2), r),
        relay=[0.8, 0.8], relay_star=[0.9, 0.9], relay_both=[0.4, 0.4], capture=True).check()
    params = SystemParams(t=(t1, 0.3), alpha=(0.7, 0.6), alpha_star=(alpha1_star, 0.9),
                          p_a=((0.5, 0.5), (0.5, 0.5)), lam_hat=tuple(lam_hat), storage=storage)
    return params, probs


def n_user_system(threshold, p_a=0.5):
    """Symmetric N-user layout: alpha=0.7, alpha*=1, t=0.1, reference geometry."""
    env = PhyEnvironment(reference_noise(), threshold)
    probs = build_success_matrix(REFERENCE_GEOMETRY, env)
    params = SystemParams(t=(0.1, 0.1), alpha=(0.7, 0.7), alpha_star=(1.0, 1.0),
                          p_a=((p_a, 1 - p_a), (p_a, 1 - p_a)), storage="exclusive")
    return params, probs, lambda n: n_user_success(REFERENCE_GEOMETRY, env, n)
