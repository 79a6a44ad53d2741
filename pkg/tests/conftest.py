# ABOUTME: Shared pytest fixtures for relay-secrecy
# ABOUTME: Keeps logs off disk and provides small reference networks

import os

os.environ.setdefault("LOG_TO_FILE", "false")
os.environ.setdefault("LOG_LEVEL", "WARNING")

import mpmath
import pytest

from src.core.models import NetworkConfig, RelayLinkParams

mpmath.mp.dps = 30

@pytest.fixture
def single_relay() -> NetworkConfig:
    """λ_m = λ_e = 1"""
    return NetworkConfig.iid(1, 1.0, 1.0)

@pytest.fixture
def iid_pair() -> NetworkConfig:
    return NetworkConfig.iid(2, 0.1, 1.0)

@pytest.fixture
def inid_network() -> NetworkConfig:
    """Three relays with distinct pole offsets"""
    return NetworkConfig(relays=tuple(
        RelayLinkParams(lambda_m=lm, lambda_e=le, gamma_avg=1.0 / lm)
        for lm, le in ((0.1, 1.0), (0.5, 0.3), (1.0, 0.1))
    ))
