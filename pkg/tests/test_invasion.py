import numpy as np
import pytest

from chemoduo import invasion as I
from chemoduo.config import DuoConfig, MonodParams, VesselParams
from conftest import make_config, random_config, random_viable_config


def _pi1(s=0.5, lam=1.0):
    return make_config((1.1, 2), (0.4, 4), (1.1, 2), (0.4, 4), (1, 1), (10, 1), s=s, lam=lam)


def _pi2(s=0.5, lam=1.0):
    return make_config((1.1, 2), (0.05, 2), (1.1, 2), (0.05, 2), (1, 1), (0.55, 2.1), s=s, lam=lam)


def _fig3a(s=0.4, lam=1.0):
    return make_config((4.2, 4), (5, 5), (2.1, 2), (0.5, 0.5), (1.9, 1.5), 8, s=s, lam=lam)


# --- one-species rate --------------------------------------------------------


def test_lambda0_frozen_oracle():
    assert I.lambda0(_pi1(), "u") == pytest.approx(-0.07945828441000363, abs=1e-12)


def test_lambda0_node_count_invariance():
    c = _pi1(lam=1e-3)
    vals = [I.lambda0(c, "u", n_nodes=n) for n in (64, 256, 1024)]
    assert max(vals) - min(vals) < 1e-12


def test_lambda0_lambda_zero_branch():
    c = _pi1(lam=0.0)
    assert I.lambda0(c, "u") == pytest.approx(I.lambda0_limits(c, "u")[0], abs=1e-15)


def test_lambda0_equal_inputs_flat_in_lambda():
    c = make_config((2, 3), (1, 2), (2, 3), (1, 2), (1.0, 1.5), 6.0, s=0.3)
    vals = [I.lambda0(c.with_coupling(lam=lam), "u") for lam in (0.01, 1.0, 100.0)]
    assert max(vals) - min(vals) == pytest.approx(0.0, abs=1e-14)


def test_lambda0_limits_match_extremes():
    c = _pi1(s=0.4)
    lim0, liminf = I.lambda0_limits(c, "u")
    assert I.lambda0(c.with_coupling(lam=1e-7), "u") == pytest.approx(lim0, abs=1e-4)
    assert I.lambda0(c.with_coupling(lam=1e6), "u") == pytest.approx(liminf, abs=1e-4)


def test_lambda0_swap_invariance():
    c = _pi1(s=0.35, lam=2.3)
    assert I.lambda0(c.swapped(), "u") == pytest.approx(I.lambda0(c, "u"), abs=1e-12)


def test_monotone_check_true_for_constant_convexity():
    lams = np.geomspace(1e-3, 1e3, 30)
    assert I.phi_convexity(_pi1(), "u") in ("convex", "concave")
    assert I.lambda0_monotone_check(_pi1(), "u", lams)


def test_monotone_check_detects_genuine_nonmonotonicity():
    # a vessel pair whose growth kernel changes convexity inside the
    # inter-vessel resource segment; the rate dips, rises, then dips again
    c = make_config(
        a_u=(2.1242, 4.1868), b_u=(3.7596, 1.4493),
        a_v=(2.1242, 4.1868), b_v=(3.7596, 1.4493),
        delta=(1.4194, 1.5476), r0=(4.7361, 6.5476), s=0.1210,
    )
    assert I.phi_convexity(c, "u") == "mixed"
    assert not I.lambda0_monotone_check(c, "u", np.geomspace(1e-3, 1e3, 30))


def test_monotone_check_rejects_bad_grid():
    with pytest.raises(ValueError):
        I.lambda0_monotone_check(_pi1(), "u", [1.0, 2.0])
    with pytest.raises(ValueError):
        I.lambda0_monotone_check(_pi1(), "u", [1.0, 3.0, 2.0])


# --- invariant density -------------------------------------------------------


def test_invariant_density_normalized():
    dens = I.invariant_density(_pi1(lam=2.0))
    x = np.linspace(dens.r_lo, dens.r_hi, 200001)[1:-1]
    total = np.trapezoid(dens.pdf(x), x)
    # trapezoid misses a sliver of mass at the integrable endpoint singularity
    assert total == pytest.approx(1.0, abs=1e-4)


def test_invariant_density_branch_mass_ratio():
    # time spent in regime 2 over regime 1 is s/(1-s); Pi1 has r0_1 > r0_2, so
    # the density relabels the vessels internally and the branches swap too
    c = _pi1(s=0.3, lam=2.0)
    dens = I.invariant_density(c)
    assert dens.swapped
    x = np.linspace(dens.r_lo, dens.r_hi, 200001)[1:-1]
    m1 = np.trapezoid(dens.branch_pdf(1, x), x)
    m2 = np.trapezoid(dens.branch_pdf(2, x), x)
    assert m1 / m2 == pytest.approx(0.3 / 0.7, rel=5e-3)


def test_invariant_density_degenerate_cases():
    with pytest.raises(I.DegenerateDensityError):
        I.invariant_density(_pi1(lam=0.0))
    equal = make_config((2, 3), (1, 2), (2, 3), (1, 2), (1.0, 1.5), 6.0)
    with pytest.raises(ValueError):
        I.invariant_density(equal)


def test_invariant_density_cdf_monotone():
    dens = I.invariant_density(_pi1(lam=0.7))
    x = np.linspace(dens.r_lo, dens.r_hi, 512)
    cdf = dens.cdf(x)
    assert cdf[0] == pytest.approx(0.0, abs=1e-9)
    assert cdf[-1] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(cdf) >= -1e-12)


# --- two-species rate --------------------------------------------------------


def test_lambda_two_frozen_oracles():
    c = _fig3a()
    assert I.lambda_two_species(c, "u") == pytest.approx(-0.23900067622907442, abs=1e-9)
    assert I.lambda_two_species(c, "v") == pytest.approx(0.07078286865698577, abs=1e-9)


def test_lambda_two_self_invasion_tiny():
    for lam in (1e-4, 0.1, 10.0, 1e3):
        c = _fig3a(lam=lam)
        vs = []
        for j in (1, 2):
            v = c.vessel(j)
            vs.append(VesselParams(delta=v.delta, r0=v.r0, monod_u=v.monod_u, monod_v=v.monod_u))
        c_self = DuoConfig(vessel1=vs[0], vessel2=vs[1], s=c.s, lam=c.lam)
        assert abs(I.lambda_two_species(c_self, "u")) < 1e-12


def test_lambda_two_limits_match_extremes():
    c = _fig3a()
    for w in ("u", "v"):
        lim0, liminf = I.lambda_two_species_limits(c, w)
        assert I.lambda_two_species(c.with_coupling(lam=1e-8), w) == pytest.approx(lim0, abs=1e-6)
        assert I.lambda_two_species(c.with_coupling(lam=1e5), w) == pytest.approx(liminf, abs=1e-4)


def test_lambda_two_requires_equal_inputs():
    c = make_config((2, 2), (1, 1), (3, 3), (2, 2), (1, 1), (10, 4))
    with pytest.raises(Exception):
        I.lambda_two_species(c, "u")


def test_lambda_two_resident_not_viable():
    # resident v cannot grow anywhere (a_v < delta)
    c = make_config((3, 3), (1, 1), (0.5, 0.5), (1, 1), (1, 1), 10.0)
    with pytest.raises(I.ResidentNotViableError):
        I.lambda_two_species(c, "u")


def test_lambda_two_random_self_invasion(rng):
    for _ in range(5):
        c = random_viable_config(rng)
        vs = []
        for j in (1, 2):
            v = c.vessel(j)
            vs.append(VesselParams(delta=v.delta, r0=v.r0, monod_u=v.monod_u, monod_v=v.monod_u))
        c_self = DuoConfig(vessel1=vs[0], vessel2=vs[1], s=c.s, lam=c.lam)
        assert abs(I.lambda_two_species(c_self, "u")) < 1e-10


# --- classification ----------------------------------------------------------


def test_classify_switching_figure_tags():
    assert I.classify_switching(_fig3a()).tag == "extinction-of-u"
    # fig3-b at (0.4, 1): both rates negative, cross-checked by Monte Carlo
    fig3b = make_config((4.2, 2), (5, 0.5), (2.1, 4), (0.5, 5), (1.7, 1.5), 8, s=0.4, lam=1.0)
    assert I.classify_switching(fig3b).tag == "exclusive-bistability"
    fig4a = make_config((3.5, 2.5), (8.75, 0.125), (1.25, 7), (1.125, 3.75), (1, 2), 7, s=0.4, lam=1.0)
    assert I.classify_switching(fig4a).tag in ("coexistence", "extinction-of-v")


def test_classify_switching_zero_band_inconclusive():
    v = I.classify_switching(_fig3a(), zero_band=10.0)
    assert v.tag == "inconclusive"


def test_classify_switching_fallback_note():
    c = make_config((3, 3), (1, 1), (0.5, 0.5), (1, 1), (1, 1), 10.0)
    v = I.classify_switching(c)
    assert any("fallback" in n for n in v.notes)
    assert v.tag == "extinction-of-v"
