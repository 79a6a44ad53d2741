# ABOUTME: Tests for network parameterization and fading generation
# ABOUTME: dB mapping, draw shapes, sample moments, distribution fits and stream independence

import numpy as np
import pytest
from scipy import stats

from src.channel.fading import (
    network_for_snr, sample_complex_realization, sample_realization, snr_db_to_rate,
)
from src.core.exceptions import ValidationError
from src.core.models import ChannelRealization, NetworkConfig, RelayOffset

class TestParameterization:

    def test_db_to_rate(self):
        assert snr_db_to_rate(10.0) == pytest.approx(0.1)
        assert snr_db_to_rate(0.0) == 1.0
        assert snr_db_to_rate(-10.0) == pytest.approx(10.0)

    def test_network_for_snr_applies_offsets(self):
        network = network_for_snr(10.0, 10.0, [RelayOffset(), RelayOffset(main_offset_db=-10.0,
                                                                          eve_offset_db=10.0)])
        np.testing.assert_allclose(network.lambda_m, [0.1, 1.0])
        np.testing.assert_allclose(network.lambda_e, [0.1, 0.01])
        np.testing.assert_allclose(network.gamma_avg, [10.0, 1.0])
        assert not network.is_iid

    def test_empty_network_rejected(self):
        with pytest.raises(ValidationError):
            NetworkConfig(relays=())

    def test_iid_network(self):
        network = NetworkConfig.iid(3, 0.5, 2.0)
        assert network.size == 3
        assert network.is_iid
        assert network.relays[0].alpha == pytest.approx(4.0)

class TestSampling:

    def test_shapes(self, inid_network):
        rng = np.random.default_rng(1)
        single = sample_realization(inid_network, rng)
        batch = sample_realization(inid_network, rng, size=7)
        assert single.gamma_sr.shape == (3,)
        assert batch.gamma_rd.shape == (7, 3)

    def test_sample_means(self, inid_network):
        draws = sample_realization(inid_network, np.random.default_rng(2), size=400000)
        np.testing.assert_allclose(draws.gamma_sr.mean(axis=0), 1.0, rtol=0.01)
        np.testing.assert_allclose(draws.gamma_rd.mean(axis=0), 1.0 / inid_network.lambda_m, rtol=0.01)
        np.testing.assert_allclose(draws.gamma_re.mean(axis=0), 1.0 / inid_network.lambda_e, rtol=0.01)

    def test_same_generator_state_same_draws(self, iid_pair):
        first = sample_realization(iid_pair, np.random.default_rng(5), size=10)
        second = sample_realization(iid_pair, np.random.default_rng(5), size=10)
        np.testing.assert_array_equal(first.gamma_re, second.gamma_re)

    def test_complex_gains_match_link_law(self, inid_network):
        gains = sample_complex_realization(inid_network, np.random.default_rng(3), size=400000)
        snr_rd = inid_network.gamma_avg * np.abs(gains.h_rd) ** 2
        snr_re = inid_network.gamma_avg * np.abs(gains.h_re) ** 2
        np.testing.assert_allclose(snr_rd.mean(axis=0), 1.0 / inid_network.lambda_m, rtol=0.01)
        np.testing.assert_allclose(snr_re.mean(axis=0), 1.0 / inid_network.lambda_e, rtol=0.01)

    def test_realization_rejects_negative_snr(self):
        with pytest.raises(ValidationError):
            ChannelRealization(gamma_sr=[1.0], gamma_rd=[-1.0], gamma_re=[1.0])

    def test_realization_rejects_mismatched_shapes(self):
        with pytest.raises(ValidationError):
            ChannelRealization(gamma_sr=[1.0, 2.0], gamma_rd=[1.0], gamma_re=[1.0])

class TestDistributions:
    """Fixed seeds; p-value floors are loose enough for any sound sampler"""

    def test_link_snrs_are_exponential(self, inid_network):
        draws = sample_realization(inid_network, np.random.default_rng(21), size=50000)
        for n in range(inid_network.size):
            assert stats.kstest(draws.gamma_sr[:, n], "expon").pvalue > 1e-3
            assert stats.kstest(draws.gamma_rd[:, n] * inid_network.lambda_m[n], "expon").pvalue > 1e-3
            assert stats.kstest(draws.gamma_re[:, n] * inid_network.lambda_e[n], "expon").pvalue > 1e-3

    def test_complex_gains_are_rayleigh_with_uniform_phase(self, inid_network):
        gains = sample_complex_realization(inid_network, np.random.default_rng(22), size=50000)
        for n in range(inid_network.size):
            scaled = inid_network.gamma_avg[n] * inid_network.lambda_m[n] * np.abs(gains.h_rd[:, n]) ** 2
            assert stats.kstest(scaled, "expon").pvalue > 1e-3
            phase = np.angle(gains.h_re[:, n])
            assert stats.kstest(phase, "uniform", args=(-np.pi, 2.0 * np.pi)).pvalue > 1e-3

    def test_links_and_relays_uncorrelated(self, iid_pair):
        trials = 200000
        draws = sample_realization(iid_pair, np.random.default_rng(23), size=trials)
        limit = 4.0 / np.sqrt(trials)
        pairs = [
            (draws.gamma_sr[:, 0], draws.gamma_rd[:, 0]),
            (draws.gamma_rd[:, 0], draws.gamma_re[:, 0]),
            (draws.gamma_rd[:, 0], draws.gamma_rd[:, 1]),
        ]
        for first, second in pairs:
            assert abs(np.corrcoef(first, second)[0, 1]) <= limit
