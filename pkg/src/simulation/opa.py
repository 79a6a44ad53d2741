# ABOUTME: Optimal power allocation baseline for DF relaying (generalized eigen-beamforming)
# ABOUTME: Exact two-dimensional subspace solve plus a vectorized paired comparison against selection

import math
from typing import Optional

import numpy as np
from scipy import linalg

from ..channel.fading import sample_complex_realization
from ..core.exceptions import ValidationError
from ..core.models import (
    Gamma0Policy, NetworkConfig, OpaComparison, OpaProblem, OpaSolution,
)
from ..shared.logger import get_logger
from .montecarlo import estimate_from_rates, run_blocks

logger = get_logger(__name__)

# roundoff allowance on the per-trial log-rate gap
DOMINANCE_TOL = 1e-9

def solve_opa(problem: OpaProblem) -> OpaSolution:
    """Maximize (1 + w^H R_m w)/(1 + w^H R_e w) subject to w^H w = γ_0"""
    gamma0 = problem.gamma0
    n = problem.size
    basis = linalg.orth(np.column_stack([problem.h_m, problem.h_e]))
    rank = basis.shape[1]

    if rank == 0:
        w = np.zeros(n, dtype=complex)
        w[0] = math.sqrt(gamma0)
        return OpaSolution(w=w, rate=0.0, objective=1.0)

    a = basis.conj().T @ problem.h_m
    b = basis.conj().T @ problem.h_e
    identity = np.eye(rank)
    main = identity + gamma0 * np.outer(a, a.conj())
    eve = identity + gamma0 * np.outer(b, b.conj())
    eigenvalues, eigenvectors = linalg.eigh(main, eve)
    objective = float(eigenvalues[-1])
    direction = basis @ eigenvectors[:, -1]

    if objective < 1.0 and rank < n:
        # any direction orthogonal to both channels reaches exactly 1
        direction = linalg.null_space(basis.conj().T)[:, 0]
        objective = 1.0

    w = math.sqrt(gamma0) * direction / np.linalg.norm(direction)
    return OpaSolution(w=w, rate=max(math.log(objective), 0.0), objective=objective)

def reduced_objective(h_m: np.ndarray, h_e: np.ndarray, gamma0: float) -> np.ndarray:
    """Largest eigenvalue of the reduced 2×2 problem, vectorized over leading axes"""
    p = gamma0 * np.sum(np.abs(h_m) ** 2, axis=-1)
    q = gamma0 * np.sum(np.abs(h_e) ** 2, axis=-1)
    # g = pq − γ0²|h_m^H h_e|² by the Lagrange identity
    cross = h_m[..., :, np.newaxis] * h_e[..., np.newaxis, :]
    g = 0.5 * gamma0 ** 2 * np.sum(np.abs(cross - np.swapaxes(cross, -1, -2)) ** 2, axis=(-2, -1))
    # det(A − λB) = (1+q)λ² − tλ + (1+p) on span{h_m, h_e}, discriminant as a sum of non-negative terms
    t = 2.0 + p + q + g
    discriminant = (p - q) ** 2 + g * (g + 2.0 * (p + q) + 4.0)
    return (t + np.sqrt(discriminant)) / (2.0 * (1.0 + q))

def selection_objective(h_m: np.ndarray, h_e: np.ndarray, gamma0: float) -> np.ndarray:
    """Best single-relay objective with all power γ_0 on one relay"""
    per_relay = (1.0 + gamma0 * np.abs(h_m) ** 2) / (1.0 + gamma0 * np.abs(h_e) ** 2)
    return np.max(per_relay, axis=-1)

def resolve_gamma0(network: NetworkConfig, policy: Gamma0Policy,
                   gamma0: Optional[float] = None) -> float:
    """Total OPA power under the chosen policy"""
    if policy is Gamma0Policy.FIXED:
        if gamma0 is None or not gamma0 > 0:
            raise ValidationError("fixed policy needs a positive gamma0", field="opa.gamma0",
                                  value=gamma0)
        return float(gamma0)
    if policy is Gamma0Policy.TOTAL:
        return float(np.sum(network.gamma_avg))
    return float(np.mean(network.gamma_avg))

def paired_rates(network: NetworkConfig, trials: int, seed: int, gamma0: float,
                 workers: Optional[int] = None) -> np.ndarray:
    """Per-trial (OPA rate, selection rate) pairs, shape (trials, 2)"""
    def trial_fn(rng: np.random.Generator, size: int) -> np.ndarray:
        gains = sample_complex_realization(network, rng, size)
        chosen = selection_objective(gains.h_rd, gains.h_re, gamma0)
        optimum = chosen if network.size == 1 else reduced_objective(gains.h_rd, gains.h_re, gamma0)
        return np.column_stack([np.log(np.maximum(optimum, 1.0)), np.log(np.maximum(chosen, 1.0))])

    return run_blocks(trial_fn, trials, seed, workers)

def compare_opa_vs_selection(network: NetworkConfig, trials: int, seed: int,
                             gamma0_policy: Gamma0Policy = Gamma0Policy.RELAY_AVERAGE,
                             gamma0: Optional[float] = None,
                             workers: Optional[int] = None) -> OpaComparison:
    """Paired OPA-DF vs S-DF secrecy rates over the same complex realizations"""
    power = resolve_gamma0(network, gamma0_policy, gamma0)
    pairs = paired_rates(network, trials, seed, power, workers)
    opa_rates, selection_rates = pairs[:, 0], pairs[:, 1]
    gap = opa_rates - selection_rates
    comparison = OpaComparison(
        opa=estimate_from_rates(opa_rates, seed),
        selection=estimate_from_rates(selection_rates, seed),
        gap=estimate_from_rates(gap, seed),
        dominance_fraction=float(np.mean(gap >= -DOMINANCE_TOL)),
    )
    logger.mc_estimate("ASR OPA-DF", comparison.opa.mean, comparison.opa.std_error, trials)
    logger.mc_estimate("OPA gain over S-DF", comparison.gap.mean, comparison.gap.std_error, trials)
    return comparison
