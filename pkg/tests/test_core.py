import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chemoduo.config import MonodParams, VesselParams
from chemoduo.core import (
    averaged_chemostat,
    best_competitor_averaged,
    break_even,
    hypothesis_Hw,
    simulate_simple_chemostat,
    vessel_unfavorable,
)
from conftest import make_config


def test_break_even_closed_form():
    be = break_even(MonodParams(2.0, 3.0), 1.0)
    assert be.value == pytest.approx(3.0, abs=1e-15)  # b*delta/(a-delta)


def test_break_even_infinite_marker():
    be = break_even(MonodParams(0.9, 1.0), 1.0)
    assert not be.finite and be.as_float() == math.inf


def test_break_even_requires_positive_delta():
    with pytest.raises(ValueError):
        break_even(MonodParams(1.0, 1.0), 0.0)


positive = st.floats(min_value=1e-3, max_value=1e3)


@given(a=positive, b=positive, delta=positive)
def test_break_even_is_growth_root(a, b, delta):
    p = MonodParams(a, b)
    be = break_even(p, delta)
    if be.finite:
        assert p(be.value) - delta == pytest.approx(0.0, abs=1e-9 * max(1.0, delta))
    else:
        assert a <= delta  # growth bounded by a: never reaches delta


def _vessel():
    return VesselParams(
        delta=1.0, r0=10.0, monod_u=MonodParams(2.0, 3.0), monod_v=MonodParams(3.0, 8.0)
    )


def test_total_concentration_relaxes_exponentially():
    v = _vessel()
    traj = simulate_simple_chemostat(v, (2.0, 1.0, 4.0), horizon=20.0)
    sigma = traj.r + traj.u + traj.v
    expected = v.r0 + (7.0 - v.r0) * np.exp(-v.delta * traj.t)
    assert np.max(np.abs(sigma - expected)) < 1e-6


def test_competitive_exclusion_single_run():
    v = _vessel()
    # u's break-even 3.0 < v's 4.0: u wins
    traj = simulate_simple_chemostat(v, (10.0, 1.0, 1.0), horizon=2000.0)
    r, u, vv = traj.endpoint()
    assert vv < 1e-6 and u > 1.0 and r == pytest.approx(3.0, abs=1e-4)


def test_negative_initial_rejected():
    with pytest.raises(ValueError):
        simulate_simple_chemostat(_vessel(), (1.0, -0.1, 0.0), horizon=1.0)


def test_averaged_vessel_mix():
    c = make_config((2.0, 4.0), (3.0, 1.0), (3.0, 3.0), (8.0, 2.0), (1.0, 2.0), (10.0, 4.0))
    avg = averaged_chemostat(c, s_override=0.25)
    assert avg.delta == pytest.approx(0.75 * 1.0 + 0.25 * 2.0)
    r0_bar = (0.75 * 1.0 * 10.0 + 0.25 * 2.0 * 4.0) / avg.delta
    assert avg.r0 == pytest.approx(r0_bar)
    # averaged consumption is the convex mix
    assert avg.consumption("u", 2.0) == pytest.approx(
        0.75 * c.vessel1.monod_u(2.0) + 0.25 * c.vessel2.monod_u(2.0)
    )


def test_averaged_break_even_is_root():
    c = make_config((2.0, 4.0), (3.0, 1.0), (3.0, 3.0), (8.0, 2.0), (1.0, 2.0), (10.0, 4.0))
    avg = averaged_chemostat(c, s_override=0.4)
    for w in ("u", "v"):
        be = avg.break_even(w)
        assert be.finite
        assert avg.growth(w, be.value) == pytest.approx(0.0, abs=1e-10)


def test_best_competitor_none_on_tie():
    c = make_config((2.0, 2.0), (3.0, 3.0), (2.0, 2.0), (3.0, 3.0), (1.0, 1.0), (10.0, 10.0))
    assert best_competitor_averaged(c, 0.5) is None  # identical species tie


def test_vessel_unfavorable_cases():
    v = _vessel()  # u: R*=3 < v: R*=4, both < r0=10
    assert not vessel_unfavorable(v, "u")
    assert vessel_unfavorable(v, "v")


def test_hypothesis_Hw_witnesses():
    # vessel 2 disfavors u (v strictly better there)
    c = make_config((2.0, 1.5), (3.0, 5.0), (3.0, 3.0), (8.0, 1.0), (1.0, 1.0), (10.0, 10.0))
    wit = hypothesis_Hw(c, "u")
    assert wit.holds and wit.vessel == 2
    # u best everywhere: H_u fails, H_v holds
    c2 = make_config((3.0, 3.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (1.0, 1.0), (10.0, 10.0))
    assert not hypothesis_Hw(c2, "u").holds
    assert hypothesis_Hw(c2, "v").holds
