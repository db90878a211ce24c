import numpy as np
import pytest
from hypothesis import given, strategies as st

from relaycoop import phy


def _sinr_monte_carlo(link, env, n, rng):
    # unit-mean exponential power gains on every link
    sig = link.tx_power_w * link.distance_m ** -link.pathloss_exponent * rng.exponential(size=n)
    intf = sum(p * d ** -link.pathloss_exponent * rng.exponential(size=n) for p, d in link.interferers)
    return np.mean(sig / (env.noise_w + intf) >= env.threshold)


@pytest.mark.parametrize("interferers", [(), ((1e-3, 110.0),), ((1e-3, 90.0), (2e-3, 150.0))])
def test_rayleigh_closed_form_matches_sampling(interferers):
    rng = np.random.default_rng(4)
    link = phy.LinkSpec(1e-3, 100.0, 4.0, interferers)
    env = phy.PhyEnvironment(phy.reference_noise(), 0.5)
    n = 400_000
    est = _sinr_monte_carlo(link, env, n, rng)
    p = phy.rayleigh_success(link, env)
    assert abs(est - p) < 4 * np.sqrt(p * (1 - p) / n)


def test_calibration_hits_target():
    g = phy.REFERENCE_GEOMETRY
    link = phy.LinkSpec(g.user_power_w[0], g.user_dest_m[0], g.exponent)
    noise = phy.calibrate_noise(0.74, link, 0.2)
    assert phy.rayleigh_success(link, phy.PhyEnvironment(noise, 0.2)) == pytest.approx(0.74, abs=1e-14)


def test_calibration_rejects_bad_target():
    link = phy.LinkSpec(1.0, 1.0)
    with pytest.raises(ValueError):
        phy.calibrate_noise(1.0, link, 0.2)
    with pytest.raises(ValueError):
        phy.calibrate_noise(0.5, phy.LinkSpec(1.0, 1.0, interferers=((1.0, 2.0),)), 0.2)


def test_link_validation():
    with pytest.raises(ValueError):
        phy.LinkSpec(-1.0, 10.0)
    with pytest.raises(ValueError):
        phy.PhyEnvironment(1e-9, 0.0)


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_capture_split_is_a_valid_mass(p1, p2):
    c1, c2 = phy.capture_split(p1, p2)
    assert 0 <= c1 <= p1 and 0 <= c2 <= p2
    assert c1 + c2 <= 1 + 1e-15
    assert c1 + c2 == pytest.approx(p1 + p2 - p1 * p2)


def test_capture_probabilities_obey_mass_constraint():
    env = phy.PhyEnvironment(phy.reference_noise(), 0.2)
    sp = phy.build_success_matrix(phy.REFERENCE_GEOMETRY, env, capture=True)
    assert sp.d_both.sum() <= 1 and np.all(sp.r_both.sum(0) <= 1) and sp.relay_both.sum() <= 1


def test_check_rejects_out_of_range():
    sp = phy.symmetric_capture_probs(0.5, 0.25, 0.9, 0.8, 0.9, 0.4)
    sp.relay_both = np.array([0.7, 0.7])
    with pytest.raises(ValueError):
        sp.check()
    sp.relay_both = np.array([1.2, 0.1])
    with pytest.raises(ValueError):
        sp.check()


def test_swapped_is_an_involution():
    g = phy.Geometry(user_dest_m=(100.0, 120.0), user_relay_m=((70.0, 90.0), (85.0, 60.0)),
                     relay_dest_m=(75.0, 95.0))
    sp = phy.build_success_matrix(g, phy.PhyEnvironment(phy.reference_noise(), 0.3))
    back = sp.swapped().swapped()
    for a, b in zip(sp.arrays(), back.arrays()):
        np.testing.assert_array_equal(a, b)
    mirrored = phy.Geometry(user_dest_m=(120.0, 100.0), user_relay_m=((60.0, 85.0), (90.0, 70.0)),
                            relay_dest_m=(95.0, 75.0))
    sm = phy.build_success_matrix(mirrored, phy.PhyEnvironment(phy.reference_noise(), 0.3))
    for a, b in zip(sp.swapped().arrays(), sm.arrays()):
        np.testing.assert_allclose(a, b, rtol=1e-14)


def test_n_user_success_is_decreasing_in_active_users():
    env = phy.PhyEnvironment(phy.reference_noise(), 1.0)
    pd, pr = phy.n_user_success(phy.REFERENCE_GEOMETRY, env, 10)
    assert np.all(np.diff(pd) < 0) and np.all(np.diff(pr) < 0)
    sp = phy.build_success_matrix(phy.REFERENCE_GEOMETRY, env)
    assert pd[0] == pytest.approx(sp.d_alone[0]) and pd[1] == pytest.approx(sp.d_both[0])
    assert pr[1] == pytest.approx(sp.r_both[0, 0])


def test_reference_table_runs_fast():
    import time
    t0 = time.perf_counter()
    for g in (0.2, 1.0):
        phy.reference_table(g)
    assert time.perf_counter() - t0 < 1.0
