# ABOUTME: Network parameterization and Rayleigh fading generation for the dual-hop wiretap model
# ABOUTME: dB/rate conversion, exponential SNR draws and circularly-symmetric complex gains

from typing import List, Optional

import numpy as np

from ..core.models import (
    NetworkConfig, RelayLinkParams, ChannelRealization, ComplexRealization, RelayOffset
)

def snr_db_to_rate(snr_db: float) -> float:
    """Rate parameter λ = 1/γ̄ of an exponential SNR with average snr_db"""
    return 10.0 ** (-snr_db / 10.0)

def network_for_snr(snr_db: float, gamma_e_db: float, relays: List[RelayOffset]) -> NetworkConfig:
    """Build a network for one sweep point; γ_n is the relay's main-channel average SNR"""
    links = []
    for offset in relays:
        lambda_m = snr_db_to_rate(snr_db + offset.main_offset_db)
        lambda_e = snr_db_to_rate(gamma_e_db + offset.eve_offset_db)
        links.append(RelayLinkParams(lambda_m=lambda_m, lambda_e=lambda_e, gamma_avg=1.0 / lambda_m))
    return NetworkConfig(relays=tuple(links))

def _draw_shape(config: NetworkConfig, size: Optional[int]) -> tuple:
    if size is None:
        return (config.size,)
    return (size, config.size)

def sample_realization(config: NetworkConfig, rng: np.random.Generator,
                       size: Optional[int] = None) -> ChannelRealization:
    """Draw instantaneous SNRs: γ_SR ~ Exp(1), γ_RD ~ Exp(λ_m), γ_RE ~ Exp(λ_e)"""
    shape = _draw_shape(config, size)
    # draw order is part of the reproducibility contract
    gamma_sr = rng.standard_exponential(shape)
    gamma_rd = rng.standard_exponential(shape) / config.lambda_m
    gamma_re = rng.standard_exponential(shape) / config.lambda_e
    return ChannelRealization(gamma_sr=gamma_sr, gamma_rd=gamma_rd, gamma_re=gamma_re)

def _complex_gaussian(rng: np.random.Generator, shape: tuple, variance: np.ndarray) -> np.ndarray:
    """Zero-mean circularly-symmetric complex Gaussian with E|h|² = variance"""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

def sample_complex_realization(config: NetworkConfig, rng: np.random.Generator,
                               size: Optional[int] = None) -> ComplexRealization:
    """Draw second-hop complex gains so that γ_n|h|² has the link's exponential law"""
    shape = _draw_shape(config, size)
    gamma_avg = config.gamma_avg
    h_rd = _complex_gaussian(rng, shape, 1.0 / (gamma_avg * config.lambda_m))
    h_re = _complex_gaussian(rng, shape, 1.0 / (gamma_avg * config.lambda_e))
    return ComplexRealization(h_rd=h_rd, h_re=h_re)
