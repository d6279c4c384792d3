"""Cell-load pmf and access-probability tests.

The sampling oracles draw loads from the gamma-Poisson mixture and
average the conditional service rules directly, independently of the
series implementations.
"""

import math

import numpy as np
import pytest

from cogd2d.params import Policy
from cogd2d.spectrum import (
    SHAPE_B,
    AccessProbs,
    CellLoadDist,
    access_probs,
    cell_load_pmf,
    q_c_rsa,
    q_f,
    q_psa,
)


@pytest.fixture(scope="module")
def dist10():
    return CellLoadDist(10.0)


class TestCellLoadDist:
    def test_zeta(self, dist10):
        b = SHAPE_B
        assert dist10.zeta == pytest.approx(b**b / math.gamma(b), rel=1e-12)

    def test_p0_frozen(self, dist10):
        # direct high-precision evaluation of (b/(b+10))^b
        assert cell_load_pmf(dist10, 0) == pytest.approx(0.008480411829274235, rel=1e-10)

    def test_empty_network(self):
        dist = CellLoadDist(0.0)
        assert cell_load_pmf(dist, 0) == 1.0
        assert cell_load_pmf(dist, 3) == 0.0

    @pytest.mark.parametrize("mean", [0.1, 1.0, 5.0, 10.0, 50.0])
    def test_normalization(self, mean):
        dist = CellLoadDist(mean)
        assert dist.pmf.sum() == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("mean", [0.5, 2.0, 10.0, 30.0])
    def test_mean_recovery(self, mean):
        assert CellLoadDist(mean).mean() == pytest.approx(mean, abs=1e-6)

    def test_beyond_truncation_is_zero(self, dist10):
        assert cell_load_pmf(dist10, dist10.n_max + 1) == 0.0

    def test_gamma_poisson_mixture_oracle(self, dist10):
        # histogram of mixture samples vs the series pmf
        rng = np.random.default_rng(42)
        draws = dist10.sample(rng, 400_000)
        hist = np.bincount(draws, minlength=60)[:60] / len(draws)
        series = dist10.pmf[:60]
        assert np.abs(hist - series).max() < 0.003

    def test_validation(self):
        with pytest.raises(ValueError):
            CellLoadDist(-1.0)


class TestChannelAvailability:
    def test_qf_no_users(self):
        assert q_f(CellLoadDist(0.0), 10) == pytest.approx(1.0, abs=1e-12)

    def test_qf_many_channels(self, dist10):
        assert q_f(dist10, 2000) == pytest.approx(1.0, abs=1e-9)

    def test_qf_sampling_oracle(self, dist10):
        # average of min(1, C/N) over mixture draws
        rng = np.random.default_rng(7)
        n = dist10.sample(rng, 10_000_000).astype(float)
        oracle = np.minimum(1.0, 10.0 / np.maximum(n, 1.0)).mean()
        assert q_f(dist10, 10) == pytest.approx(oracle, abs=1e-3)

    def test_qf_frozen(self, dist10):
        assert q_f(dist10, 10) == pytest.approx(0.8697359073211631, rel=1e-9)


class TestAccessProbabilities:
    def test_qc_rsa_no_users(self):
        assert q_c_rsa(CellLoadDist(0.0), 10) == pytest.approx(0.0, abs=1e-12)

    def test_qc_rsa_saturated(self):
        assert q_c_rsa(CellLoadDist(5000.0), 10) == pytest.approx(1.0, abs=1e-6)

    def test_qc_rsa_sampling_oracle(self, dist10):
        # E[min(N, C)] / C over mixture draws
        rng = np.random.default_rng(11)
        n = dist10.sample(rng, 10_000_000).astype(float)
        oracle = np.minimum(n, 10.0).mean() / 10.0
        assert q_c_rsa(dist10, 10) == pytest.approx(oracle, abs=1e-3)

    def test_qc_rsa_frozen(self, dist10):
        assert q_c_rsa(dist10, 10) == pytest.approx(0.7603419555768435, rel=1e-9)

    def test_psa_no_users(self):
        dist = CellLoadDist(0.0)
        assert q_psa(dist, 10) == (pytest.approx(0.0, abs=1e-12), pytest.approx(0.0, abs=1e-12))

    def test_psa_needs_two_channels(self, dist10):
        with pytest.raises(ValueError):
            q_psa(dist10, 1)

    def test_psa_frozen(self, dist10):
        qc, qd = q_psa(dist10, 10)
        assert qc == pytest.approx(0.7936201363945801, rel=1e-9)
        assert qd == pytest.approx(0.4608383282172145, rel=1e-9)

    @pytest.mark.parametrize("mean", range(1, 31, 3))
    @pytest.mark.parametrize("c", [2, 5, 10, 20, 30])
    def test_policy_identities(self, mean, c):
        # reduction in D2D-channel use and the matching congestion increase
        dist = CellLoadDist(float(mean))
        qc_rsa = q_c_rsa(dist, c)
        qc_psa, qd_psa = q_psa(dist, c)
        n = np.arange(c)
        expected_drop = float(np.sum(n / c * dist.pmf[:c]))
        assert qc_rsa - qd_psa == pytest.approx(expected_drop, abs=1e-10)
        assert (qc_psa - qc_rsa) * (c - 1) == pytest.approx(qc_rsa - qd_psa, abs=1e-10)

    def test_saturation_limit(self):
        # q_c * C approaches the user/station ratio for huge channel pools
        for mean in (2.0, 10.0):
            dist = CellLoadDist(mean)
            c = int(50 * mean)
            assert q_c_rsa(dist, c) * c == pytest.approx(mean, rel=0.01)

    def test_monotonicity(self, dist10):
        cs = [2, 4, 8, 16, 32, 64]
        qc = [q_c_rsa(dist10, c) for c in cs]
        qf = [q_f(dist10, c) for c in cs]
        qd = [q_psa(dist10, c)[1] for c in cs]
        assert all(a > b for a, b in zip(qc, qc[1:]))
        assert all(a < b for a, b in zip(qf, qf[1:]))
        assert all(a > b for a, b in zip(qd, qd[1:]))


class TestAccessProbsBundle:
    def test_rsa_symmetry(self, dist10):
        probs = access_probs(dist10, 10, Policy.RSA)
        assert probs.q_c == probs.q_d

    def test_psa_ordering(self, dist10):
        probs = access_probs(dist10, 10, Policy.PSA)
        assert probs.q_d < probs.q_c

    def test_qf_policy_independent(self, dist10):
        rsa = access_probs(dist10, 10, Policy.RSA)
        psa = access_probs(dist10, 10, Policy.PSA)
        assert rsa.q_f == psa.q_f

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            AccessProbs(1.5, 0.5, 0.5, Policy.RSA, 10)
