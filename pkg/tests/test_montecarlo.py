# ABOUTME: Tests for Monte Carlo relay selection and estimation
# ABOUTME: Selection rules, reproducibility across worker counts, and agreement with closed forms

import math

import numpy as np
import pytest

from src.analytics.services.closed_form import asr_af_closed, asr_df_closed, outage_probability
from src.core.exceptions import DomainError, ValidationError
from src.core.models import AfModel, AfVariant, ChannelRealization, NetworkConfig, Strategy
from src.channel.fading import sample_realization
from src.simulation.montecarlo import (
    block_generator, estimate_asr, estimate_from_rates, estimate_outage, outage_from_rates,
    run_blocks, select_af, select_df, simulate_rates,
)

class TestRandomStreams:

    def test_block_stream_is_reproducible(self):
        first = block_generator(7, 3).standard_normal(5)
        second = block_generator(7, 3).standard_normal(5)
        np.testing.assert_array_equal(first, second)

    def test_blocks_are_distinct(self):
        assert block_generator(7, 0).random() != block_generator(7, 1).random()

    def test_run_blocks_sizes(self):
        values = run_blocks(lambda rng, size: np.full(size, size), 10, seed=1, workers=2, block_size=4)
        np.testing.assert_array_equal(values, [4] * 8 + [2] * 2)

    def test_run_blocks_rejects_zero_trials(self):
        with pytest.raises(ValidationError):
            run_blocks(lambda rng, size: np.zeros(size), 0, seed=1)

    @pytest.mark.parametrize("strategy", [Strategy.SDF, Strategy.SAF])
    def test_worker_count_does_not_change_samples(self, inid_network, strategy):
        serial = simulate_rates(inid_network, strategy, 20000, seed=9, workers=1, block_size=1024)
        parallel = simulate_rates(inid_network, strategy, 20000, seed=9, workers=4, block_size=1024)
        np.testing.assert_array_equal(serial, parallel)

    def test_block_size_is_part_of_the_stream_key(self, inid_network):
        small = simulate_rates(inid_network, Strategy.SDF, 4096, seed=9, workers=1, block_size=1024)
        large = simulate_rates(inid_network, Strategy.SDF, 4096, seed=9, workers=3, block_size=2048)
        same = simulate_rates(inid_network, Strategy.SDF, 4096, seed=9, workers=3, block_size=1024)
        np.testing.assert_array_equal(small, same)
        assert not np.array_equal(small, large)

class TestSelection:

    def test_df_picks_largest_ratio(self):
        realization = ChannelRealization(gamma_sr=[[1.0, 1.0, 1.0]], gamma_rd=[[3.0, 9.0, 1.0]],
                                         gamma_re=[[1.0, 1.0, 0.0]])
        outcome = select_df(realization)
        assert outcome.relay_index[0] == 1
        assert outcome.z_value[0] == pytest.approx(5.0)

    def test_df_tie_goes_to_lowest_index(self):
        realization = ChannelRealization(gamma_sr=[1.0, 1.0], gamma_rd=[3.0, 3.0], gamma_re=[1.0, 1.0])
        assert select_df(realization).relay_index == 0

    def test_df_rate_floor(self):
        realization = ChannelRealization(gamma_sr=[1.0], gamma_rd=[0.5], gamma_re=[2.0])
        assert select_df(realization).rate == 0.0

    def test_decoding_threshold_excludes_relays(self):
        realization = ChannelRealization(gamma_sr=[0.1, 2.0], gamma_rd=[9.0, 1.0], gamma_re=[0.0, 0.0])
        outcome = select_df(realization, decoding_threshold=0.5)
        assert outcome.relay_index == 1
        assert outcome.rate == pytest.approx(math.log(2.0))

    def test_no_decoding_relay(self):
        realization = ChannelRealization(gamma_sr=[0.1, 0.2], gamma_rd=[9.0, 1.0], gamma_re=[0.0, 0.0])
        outcome = select_df(realization, decoding_threshold=0.5)
        assert outcome.relay_index == -1
        assert outcome.z_value == 1.0
        assert outcome.rate == 0.0

    def test_af_product_shared_first_hop(self):
        realization = ChannelRealization(gamma_sr=[0.5, 100.0], gamma_rd=[1.0, 1.0], gamma_re=[0.0, 0.5])
        shared = select_af(realization, AfModel(shared_first_hop=True))
        # relay 1 reuses relay 0's first hop: Z = (1+0.5)/(1+0.25)
        assert shared.relay_index == 0
        assert shared.z_value == pytest.approx(1.5)
        independent = select_af(realization, AfModel(shared_first_hop=False))
        assert independent.relay_index == 1
        assert independent.z_value == pytest.approx(101.0 / 51.0)

    def test_exact_aps_needs_network(self):
        realization = ChannelRealization(gamma_sr=[1.0], gamma_rd=[1.0], gamma_re=[1.0])
        with pytest.raises(DomainError):
            select_af(realization, AfModel(variant=AfVariant.EXACT_APS))

    def test_exact_aps_never_beats_product(self, iid_pair):
        draws = sample_realization(iid_pair, np.random.default_rng(4), size=50000)
        product = select_af(draws, AfModel()).rate
        exact = select_af(draws, AfModel(variant=AfVariant.EXACT_APS), iid_pair).rate
        assert np.all(exact <= product + 1e-12)

    def test_opa_is_not_a_selection_strategy(self, iid_pair):
        with pytest.raises(DomainError):
            simulate_rates(iid_pair, Strategy.OPA_DF, 10, seed=1)

class TestEstimators:

    def test_estimate_from_rates(self):
        estimate = estimate_from_rates(np.array([1.0, 2.0, 3.0]), seed=5)
        assert estimate.mean == 2.0
        assert estimate.std_error == pytest.approx(1.0 / math.sqrt(3.0))
        assert estimate.trials == 3 and estimate.seed == 5

    def test_outage_from_rates(self):
        estimate = outage_from_rates(np.array([0.0, 0.2, 0.7, 1.5]), 0.5, seed=0)
        assert estimate.mean == 0.5
        assert estimate.std_error == pytest.approx(0.25)

    def test_df_asr_agrees_with_closed_form(self, single_relay):
        estimate = estimate_asr(single_relay, Strategy.SDF, 200000, seed=2024)
        assert estimate.contains(asr_df_closed(single_relay), multiplier=4.0)

    def test_af_asr_agrees_with_closed_form(self, iid_pair):
        estimate = estimate_asr(iid_pair, Strategy.SAF, 200000, seed=2024, af_model=AfModel())
        assert estimate.contains(asr_af_closed(iid_pair), multiplier=4.0)

    def test_df_outage_agrees_with_closed_form(self, iid_pair):
        estimate = estimate_outage(iid_pair, Strategy.SDF, 0.5, 200000, seed=2024)
        analytic = outage_probability(iid_pair, Strategy.SDF, 0.5)
        sigma = math.sqrt(analytic * (1 - analytic) / 200000)
        assert abs(estimate.mean - analytic) <= 4.0 * sigma

    def test_df_beats_af_beyond_noise(self):
        network = NetworkConfig.iid(2, 0.1, 1.0)
        df = estimate_asr(network, Strategy.SDF, 200000, seed=1)
        af = estimate_asr(network, Strategy.SAF, 200000, seed=1, af_model=AfModel())
        assert df.mean - af.mean > 3.0 * math.hypot(df.std_error, af.std_error)
