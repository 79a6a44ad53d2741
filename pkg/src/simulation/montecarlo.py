# ABOUTME: Monte Carlo estimation of secrecy rate and outage for S-DF and S-AF relay selection
# ABOUTME: Counter-based per-block random streams make results independent of the worker count

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np

from ..channel.fading import sample_realization
from ..core.exceptions import DomainError, ValidationError
from ..core.models import (
    AfModel, AfVariant, ChannelRealization, EstimateWithCI, NetworkConfig, SelectionOutcome,
    Strategy,
)
from ..shared.config import config as app_config
from ..shared.logger import get_logger

logger = get_logger(__name__)

# --- random streams -------------------------------------------------------------

def block_generator(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one block of trials, derived from (seed, block)"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))

def run_blocks(trial_fn: Callable[[np.random.Generator, int], np.ndarray], trials: int,
               seed: int, workers: Optional[int] = None,
               block_size: Optional[int] = None) -> np.ndarray:
    """Evaluate trial_fn over fixed-size blocks and concatenate per-trial values in block order"""
    if trials < 1:
        raise ValidationError("at least one trial is required", field="trials", value=trials)
    block_size = block_size or app_config.block_size
    workers = app_config.resolve_workers(workers)
    sizes = [min(block_size, trials - start) for start in range(0, trials, block_size)]

    def run(block: int) -> np.ndarray:
        return trial_fn(block_generator(seed, block), sizes[block])

    if workers == 1 or len(sizes) == 1:
        chunks = [run(block) for block in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, range(len(sizes))))
    return np.concatenate(chunks, axis=0)

# --- relay selection ------------------------------------------------------------

def _select(z: np.ndarray) -> SelectionOutcome:
    """Pick the relay with the largest Z (ties → lowest index)"""
    index = np.argmax(z, axis=-1)
    z_max = np.take_along_axis(z, index[..., np.newaxis], axis=-1)[..., 0]
    no_relay = ~np.isfinite(z_max)
    if np.any(no_relay):
        index = np.where(no_relay, -1, index)
        z_max = np.where(no_relay, 1.0, z_max)
    return SelectionOutcome(relay_index=index, z_value=z_max, rate=np.log(np.maximum(z_max, 1.0)))

def select_df(realization: ChannelRealization, decoding_threshold: float = 0.0) -> SelectionOutcome:
    """S-DF selection: Z_n = (1 + γ_RD,n)/(1 + γ_RE,n)"""
    z = (1.0 + realization.gamma_rd) / (1.0 + realization.gamma_re)
    if decoding_threshold > 0.0:
        # relays that failed to decode the first hop cannot be selected
        z = np.where(realization.gamma_sr > decoding_threshold, z, -np.inf)
    return _select(z)

def select_af(realization: ChannelRealization, model: AfModel,
              network: Optional[NetworkConfig] = None) -> SelectionOutcome:
    """S-AF selection under the product approximation or the exact fixed-gain relay"""
    gamma_sr = realization.gamma_sr
    if model.shared_first_hop:
        gamma_sr = np.broadcast_to(gamma_sr[..., :1], gamma_sr.shape)

    if model.variant is AfVariant.APPROX_PRODUCT:
        main = gamma_sr * realization.gamma_rd
        eve = gamma_sr * realization.gamma_re
    else:
        if network is None:
            raise DomainError("EXACT-APS selection needs the network parameters",
                              argument="network")
        # first-hop average SNR sits boost dB above the stronger second-hop link
        first_hop_avg = model.boost_factor / np.minimum(network.lambda_m, network.lambda_e)
        gain = 1.0 + first_hop_avg
        gamma_1 = first_hop_avg * gamma_sr
        main = gamma_1 * realization.gamma_rd / (realization.gamma_rd + gain)
        eve = gamma_1 * realization.gamma_re / (realization.gamma_re + gain)
    return _select((1.0 + main) / (1.0 + eve))

# --- estimators -----------------------------------------------------------------

def simulate_rates(network: NetworkConfig, strategy: Strategy, trials: int, seed: int,
                   af_model: Optional[AfModel] = None, workers: Optional[int] = None,
                   decoding_threshold: float = 0.0,
                   block_size: Optional[int] = None) -> np.ndarray:
    """Per-trial instantaneous secrecy rates of the selected relay"""
    if strategy is Strategy.SDF:
        def trial_fn(rng: np.random.Generator, size: int) -> np.ndarray:
            return select_df(sample_realization(network, rng, size), decoding_threshold).rate
    elif strategy is Strategy.SAF:
        model = af_model or AfModel()

        def trial_fn(rng: np.random.Generator, size: int) -> np.ndarray:
            return select_af(sample_realization(network, rng, size), model, network).rate
    else:
        raise DomainError(f"selection simulation does not cover {strategy.value}",
                          argument="strategy", value=strategy)
    return run_blocks(trial_fn, trials, seed, workers, block_size)

def estimate_from_rates(rates: np.ndarray, seed: int) -> EstimateWithCI:
    """Sample mean and standard error of per-trial rates"""
    trials = int(rates.size)
    mean = math.fsum(rates) / trials
    std = float(np.std(rates, ddof=1)) if trials > 1 else 0.0
    return EstimateWithCI(mean=mean, std_error=std / math.sqrt(trials), trials=trials, seed=seed)

def outage_from_rates(rates: np.ndarray, target_rate: float, seed: int) -> EstimateWithCI:
    """Outage frequency {rate ≤ R} with its binomial standard error"""
    if not (target_rate >= 0.0):
        raise DomainError(f"target rate must be non-negative, got {target_rate}",
                          argument="target_rate", value=target_rate)
    trials = int(rates.size)
    frequency = int(np.count_nonzero(rates <= target_rate)) / trials
    std_error = math.sqrt(frequency * (1.0 - frequency) / trials)
    return EstimateWithCI(mean=frequency, std_error=std_error, trials=trials, seed=seed)

def estimate_asr(network: NetworkConfig, strategy: Strategy, trials: int, seed: int,
                 af_model: Optional[AfModel] = None, workers: Optional[int] = None,
                 decoding_threshold: float = 0.0) -> EstimateWithCI:
    """Monte Carlo average secrecy rate"""
    rates = simulate_rates(network, strategy, trials, seed, af_model, workers, decoding_threshold)
    estimate = estimate_from_rates(rates, seed)
    logger.mc_estimate(f"ASR {strategy.value}", estimate.mean, estimate.std_error, trials)
    return estimate

def estimate_outage(network: NetworkConfig, strategy: Strategy, target_rate: float, trials: int,
                    seed: int, af_model: Optional[AfModel] = None,
                    workers: Optional[int] = None,
                    decoding_threshold: float = 0.0) -> EstimateWithCI:
    """Monte Carlo secrecy outage probability at target_rate"""
    rates = simulate_rates(network, strategy, trials, seed, af_model, workers, decoding_threshold)
    estimate = outage_from_rates(rates, target_rate, seed)
    logger.mc_estimate(f"P_out({target_rate:g}) {strategy.value}", estimate.mean,
                       estimate.std_error, trials)
    return estimate
