import sys

import numpy as np
import pytest
from hypothesis import settings

from relaycoop import bvp, presets
from relaycoop.analysis import InstabilityError
from relaycoop.model import SystemParams, classify_case, derive_coefficients
from relaycoop.phy import SuccessProbabilities, capture_split

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_probs(rng):
    def split(lo, hi):
        return np.array(capture_split(*rng.uniform(lo, hi, 2)))

    return SuccessProbabilities(
        d_alone=rng.uniform(0.2, 0.9, 2), d_both=split(0.1, 0.7),
        r_alone=rng.uniform(0.1, 0.9, (2, 2)),
        r_both=np.column_stack([split(0.1, 0.8), split(0.1, 0.8)]),
        r_other=rng.uniform(0.1, 0.9, (2, 2)),
        relay=rng.uniform(0.5, 1.0, 2), relay_star=rng.uniform(0.5, 1.0, 2),
        relay_both=split(0.3, 0.9), capture=True).check()


def random_params(rng, lam_max=0.1, storage="duplicate"):
    alpha = rng.uniform(0.3, 1.0, 2)
    return SystemParams(t=tuple(rng.uniform(0.02, 0.3, 2)), alpha=tuple(alpha),
                        alpha_star=tuple(rng.uniform(alpha, 1.0)),
                        p_a=tuple(map(tuple, np.column_stack([p := rng.uniform(0, 1, 2), 1 - p]))),
                        lam_hat=tuple(rng.uniform(0, lam_max, 2)), storage=storage)


def random_supported(rng, kind="rh", margin=0.9, max_tries=10_000):
    """Coefficients of a random duplicate-storage system inside the analytic domain.

    margin bounds lam / (T b) so the queues are not arbitrarily close to saturation.
    """
    for _ in range(max_tries):
        params, probs = random_params(rng), random_probs(rng)
        c = derive_coefficients(params, probs)
        try:
            bvp.check_supported(c)
        except (InstabilityError, bvp.UnsupportedRegionError):
            continue
        if np.all(c.lam < margin * c.T * c.b) and classify_case(c).kind == kind:
            return params, probs, c
    raise RuntimeError("no supported set found")


def pole_case():
    """A set whose x-side boundary function has one pole outside the unit disc."""
    params = SystemParams(t=(0.07, 0.263), alpha=(0.577, 0.971), alpha_star=(0.599, 0.991),
                          lam_hat=(0.175, 0.044))
    probs = SuccessProbabilities(
        d_alone=[0.55, 0.872], d_both=[0.4917, 0.2031], r_alone=[[0.475, 0.3637], [0.3349, 0.3811]],
        r_both=[[0.2622, 0.212], [0.5996, 0.4238]], r_other=[[0.8127, 0.7802], [0.5212, 0.7138]],
        relay=[0.7892, 0.6086], relay_star=[0.544, 0.8223], relay_both=[0.6642, 0.2848],
        capture=True).check()
    return params, probs


@pytest.fixture(scope="session")
def symmetric_inputs():
    return presets.symmetric_delay_inputs()


@pytest.fixture(scope="session")
def symmetric_coeffs(symmetric_inputs):
    return derive_coefficients(*presets.symmetric_system(symmetric_inputs))


@pytest.fixture(scope="session")
def asymmetric_coeffs():
    return derive_coefficients(*presets.asymmetric_system(lam_hat=(0.03, 0.02)))


@pytest.fixture(scope="session")
def asymmetric_solution(asymmetric_coeffs):
    return bvp.solve(asymmetric_coeffs)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
