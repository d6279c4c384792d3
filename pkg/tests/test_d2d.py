"""D2D-side closed-form tests.

Fading-sampling oracles (protection radius, exposure) and the Levy-law
route (scipy.stats.levy) are independent of the implementation paths they
check.
"""

import math

import numpy as np
import pytest
import scipy.stats

from cogd2d import d2d
from cogd2d.params import ChannelPlan, NetworkParams, Policy, Side
from cogd2d.spectrum import CellLoadDist, access_probs
from cogd2d.units import dbm_to_watts


def make_params(**overrides) -> NetworkParams:
    base = dict(
        lambda_b=1e-6,
        lambda_u=10e-6,
        lambda_d=20e-6,
        p_b=dbm_to_watts(37.0),
        rho_b=dbm_to_watts(-70.0),
        rho_d=dbm_to_watts(-70.0),
        sigma_z2=dbm_to_watts(-104.0),
        gamma_sense=dbm_to_watts(-60.0),
        d_o=10.0,
        tau=1.0,
        alpha=4.0,
        beta=3.0,
    )
    base.update(overrides)
    return NetworkParams(**base)


def plan_for(n_channels=10, side=Side.DOWNLINK, policy=Policy.RSA) -> ChannelPlan:
    return ChannelPlan.even_split(n_channels, side, policy)


class TestProtectionRadius:
    def test_unit_power_ratio(self):
        p = make_params(gamma_sense=dbm_to_watts(37.0))
        got = d2d.protection_radius(p, plan_for())
        assert got == pytest.approx(math.gamma(1.25), rel=1e-12)

    def test_downlink_frozen(self):
        # direct evaluation of (P_B / gamma)^(1/4) * Gamma(5/4)
        got = d2d.protection_radius(make_params(), plan_for())
        assert got == pytest.approx(241.16877849652235, rel=1e-12)

    def test_downlink_fading_oracle(self):
        # mean of (P_B h / gamma)^(1/alpha) over exponential fading draws
        p = make_params()
        rng = np.random.default_rng(5)
        h = rng.exponential(size=2_000_000)
        oracle = np.mean((p.p_b * h / p.gamma_sense) ** 0.25)
        assert d2d.protection_radius(p, plan_for()) == pytest.approx(oracle, rel=2e-3)

    def test_uplink_density_scaling(self):
        p1 = make_params()
        p2 = make_params(lambda_b=2e-6)
        plan = plan_for(side=Side.UPLINK)
        ratio = d2d.protection_radius(p1, plan) / d2d.protection_radius(p2, plan)
        assert ratio == pytest.approx(math.sqrt(2.0), rel=1e-12)


class TestSensingExposure:
    def test_downlink_frozen(self):
        got = d2d.sensing_exposure(make_params(), plan_for())
        assert got == pytest.approx(0.19710371657125889, rel=1e-12)

    def test_disc_area_oracle(self):
        # lambda_b * E[pi r_P^2] over fading draws
        p = make_params()
        rng = np.random.default_rng(9)
        h = rng.exponential(size=2_000_000)
        areas = math.pi * ((p.p_b * h / p.gamma_sense) ** 0.25) ** 2
        assert d2d.sensing_exposure(p, plan_for()) == pytest.approx(
            p.lambda_b * areas.mean(), rel=3e-3
        )

    def test_threshold_to_infinity(self):
        p = make_params(gamma_sense=1e12)
        assert d2d.sensing_exposure(p, plan_for()) < 1e-6

    def test_uplink_independent_of_bs_density(self):
        plan = plan_for(side=Side.UPLINK)
        a = d2d.sensing_exposure(make_params(), plan)
        b = d2d.sensing_exposure(make_params(lambda_b=5e-6), plan)
        assert a == b


class TestPFree:
    def test_unused_channel(self):
        assert d2d.p_free(make_params(), plan_for(), 0.0) == 1.0

    def test_frozen_value(self):
        got = d2d.p_free(make_params(), plan_for(), 1.0)
        assert got == pytest.approx(0.8211054666524941, rel=1e-10)

    def test_increasing_in_threshold_decreasing_in_qd(self):
        plan = plan_for()
        gammas = [dbm_to_watts(g) for g in (-80.0, -70.0, -60.0, -50.0)]
        vals = [d2d.p_free(make_params(gamma_sense=g), plan, 0.5) for g in gammas]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        qs = [0.1, 0.3, 0.6, 0.9]
        vals = [d2d.p_free(make_params(), plan, q) for q in qs]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestHarvestScales:
    def test_empty_sides(self):
        p = make_params()
        dl_only = ChannelPlan(10, 0, Side.DOWNLINK, Policy.RSA)
        ul_only = ChannelPlan(0, 10, Side.UPLINK, Policy.RSA)
        assert d2d.harvest_scales(p, ul_only)[0] == 0.0
        assert d2d.harvest_scales(p, dl_only)[1] == 0.0

    @pytest.mark.parametrize("policy", [Policy.RSA, Policy.PSA])
    @pytest.mark.parametrize("n", [2, 7, 10, 15])
    def test_quartic_closed_form_matches(self, policy, n):
        p = make_params()
        plan = plan_for(n, Side.DOWNLINK, policy)
        total = d2d.harvest_scales(p, plan)[2]
        closed = d2d.harvest_scale_quartic(p, plan)
        assert total == pytest.approx(closed, rel=1e-10)

    def test_single_downlink_channel_coefficient(self):
        # the one-term gamma-ratio sum must equal the closed form's first
        # central-binomial term: pi^2/2 * q_c * lambda_b * sqrt(a P_B)
        p = make_params()
        plan = ChannelPlan(1, 0, Side.DOWNLINK, Policy.RSA)
        dist = CellLoadDist(p.mean_load)
        qc = access_probs(dist, 1, Policy.RSA).q_c
        expected = 0.5 * math.pi**2 * qc * p.lambda_b * math.sqrt(p.a * p.p_b)
        assert d2d.harvest_scales(p, plan, dist)[0] == pytest.approx(expected, rel=1e-12)

    def test_total_is_sum(self):
        s_dl, s_ul, s = d2d.harvest_scales(make_params(), plan_for())
        assert s == s_dl + s_ul


class TestPSufficient:
    def test_zero_scale(self):
        assert d2d.p_sufficient(make_params(), plan_for(), scale=0.0) == 0.0

    def test_free_inversion_limit(self):
        # rho_d -> 0 makes the threshold vanish
        p = make_params(rho_d=1e-30)
        assert d2d.p_sufficient(p, plan_for()) == pytest.approx(1.0, abs=1e-12)

    def test_levy_route(self):
        # the alpha=4 law is Levy(0, scale^2/2); scipy's survival function
        # is an independent path to the same number
        p = make_params()
        plan = plan_for()
        scale = d2d.harvest_scales(p, plan)[2]
        threshold = p.rho_d * p.d_o**p.beta
        ref = float(scipy.stats.levy.sf(threshold, loc=0.0, scale=scale**2 / 2.0))
        assert d2d.p_sufficient(p, plan) == pytest.approx(ref, rel=1e-9)

    @pytest.mark.parametrize("ratio", [0.01, 0.1, 0.5, 1.0, 2.0, 5.0])
    def test_integral_matches_erf_at_alpha4(self, ratio):
        p = make_params()
        plan = plan_for()
        threshold = p.rho_d * p.d_o**p.beta
        scale = 2.0 * ratio * math.sqrt(threshold)
        closed = d2d.p_sufficient(p, plan, scale=scale, method="closed")
        integral = d2d.p_sufficient(p, plan, scale=scale, method="integral")
        assert integral == pytest.approx(closed, abs=1e-6)

    def test_general_alpha_frozen(self):
        # quadrature anchor computed with 40-digit arithmetic
        p = make_params(alpha=3.0, rho_d=1.0, d_o=1.0, beta=3.0)
        got = d2d.p_sufficient(p, plan_for(), scale=1.0)
        assert got == pytest.approx(0.4737411515567512, rel=1e-8)

    def test_monotone_in_bs_density_and_sensitivity(self):
        plan = plan_for()
        ps = [
            d2d.p_sufficient(make_params(lambda_b=l, lambda_u=10 * l), plan)
            for l in (0.5e-6, 1e-6, 2e-6, 4e-6)
        ]
        assert all(a < b for a, b in zip(ps, ps[1:]))
        ps = [
            d2d.p_sufficient(make_params(rho_d=dbm_to_watts(r)), plan)
            for r in (-90.0, -80.0, -70.0, -60.0)
        ]
        assert all(a > b for a, b in zip(ps, ps[1:]))


class TestSinrOutage:
    def test_zero_threshold(self):
        assert d2d.sinr_outage(make_params(tau=0.0), plan_for(), 0.5, 0.5, 0.5) == 0.0

    def test_no_interference_no_noise(self):
        p = make_params(lambda_d=0.0, sigma_z2=0.0)
        assert d2d.sinr_outage(p, plan_for(), 1.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_increasing_in_tau_density_qd(self):
        p = make_params()
        plan = plan_for()
        taus = [0.1, 1.0, 10.0]
        vals = [d2d.sinr_outage(make_params(tau=t), plan, 0.2, 0.9, 0.5) for t in taus]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        dens = [1e-6, 1e-5, 1e-4]
        vals = [d2d.sinr_outage(make_params(lambda_d=l), plan, 0.2, 0.9, 0.5) for l in dens]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        qds = [0.1, 0.5, 0.9]
        vals = [d2d.sinr_outage(p, plan, 0.2, 0.9, q) for q in qds]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestTotalOutage:
    def test_edges(self):
        assert d2d.total_outage(0.0, 0.3) == 1.0
        assert d2d.total_outage(1.0, 0.3) == 0.3
        assert d2d.total_outage(0.4, 0.0) == pytest.approx(0.6)

    @pytest.mark.parametrize("p_t", [0.0, 0.3, 0.9])
    @pytest.mark.parametrize("o_d", [0.0, 0.4, 1.0])
    def test_bounds(self, p_t, o_d):
        tot = d2d.total_outage(p_t, o_d)
        assert max(1.0 - p_t, o_d * p_t) - 1e-12 <= tot <= 1.0 + 1e-12


class TestCrossoverDensity:
    def test_frozen_reference(self):
        got = d2d.crossover_bs_density(make_params())
        assert got * 1e6 == pytest.approx(1.42, abs=0.01)

    def test_equal_powers(self):
        p = make_params(rho_b=make_params().p_b)
        assert d2d.crossover_bs_density(p) == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_exposure_and_power_coincide_at_crossover(self):
        base = make_params()
        lam = d2d.crossover_bs_density(base)
        p = make_params(lambda_b=lam, lambda_u=10 * lam)
        dl = ChannelPlan.even_split(10, Side.DOWNLINK, Policy.RSA)
        ul = ChannelPlan.even_split(10, Side.UPLINK, Policy.RSA)
        assert d2d.sensing_exposure(p, dl) == pytest.approx(
            d2d.sensing_exposure(p, ul), rel=1e-12
        )
        mean_dl = p.p_b
        mean_ul = p.rho_b / (math.pi * p.lambda_b) ** (p.alpha / 2.0)
        assert mean_dl == pytest.approx(mean_ul, rel=1e-12)


class TestEvaluate:
    def test_product_identity(self):
        m = d2d.evaluate(make_params(), plan_for())
        assert m.p_t == m.p_s * m.p_f
        assert m.harvest_scale == m.harvest_scale_dl + m.harvest_scale_ul
        assert m.o_d_tot == pytest.approx(1.0 - m.p_t + m.p_t * m.o_d, abs=1e-15)

    def test_quadrature_path_consistent_with_closed_form(self):
        # near-quartic exponents must land next to the quartic value
        m4 = d2d.evaluate(make_params(), plan_for())
        m4eps = d2d.evaluate(make_params(alpha=4.0 + 1e-7), plan_for())
        assert m4eps.p_s == pytest.approx(m4.p_s, abs=1e-6)

    def test_psa_beats_rsa_for_d2d(self):
        p = make_params()
        for side in (Side.DOWNLINK, Side.UPLINK):
            rsa = d2d.evaluate(p, plan_for(side=side, policy=Policy.RSA))
            psa = d2d.evaluate(p, plan_for(side=side, policy=Policy.PSA))
            assert psa.o_d < rsa.o_d
            assert psa.p_f > rsa.p_f
