# ABOUTME: Partial-fraction expansion of the S-DF selection survival function 1 − F_max(z)
# ABOUTME: Subset enumeration with pole clustering, repeated poles and binomial grouping of identical relays

import itertools
import math
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from ...core.exceptions import PoleClusteringError, RelayCountError
from ...core.models import NetworkConfig, PartialFractionTerm, Expansion
from ...shared.config import config as app_config
from ...shared.logger import get_logger

logger = get_logger(__name__)

def cluster_poles(alphas: List[float], merge_tol: float, separation_tol: float
                  ) -> Tuple[List[float], List[int]]:
    """Merge numerically coincident pole offsets; returns (representatives, cluster index per input)"""
    representatives: List[float] = []
    cluster_of = [0] * len(alphas)
    for index in sorted(range(len(alphas)), key=lambda i: alphas[i]):
        alpha = alphas[index]
        if representatives:
            previous = representatives[-1]
            gap = abs(alpha - previous)
            scale = max(alpha, previous)
            if gap <= merge_tol * scale:
                cluster_of[index] = len(representatives) - 1
                continue
            if gap < separation_tol * scale:
                raise PoleClusteringError(
                    f"Poles {previous:.12g} and {alpha:.12g} are distinct but closer than "
                    f"the separation tolerance {separation_tol:g}; perturb the parameters "
                    f"or use the quadrature oracle",
                    alpha_i=previous, alpha_j=alpha,
                )
        representatives.append(alpha)
        cluster_of[index] = len(representatives) - 1
    return representatives, cluster_of

def principal_parts(poles: Dict[int, int], representatives: List[float]
                    ) -> List[Tuple[int, int, float]]:
    """Coefficients A_{k,j} of 1/∏_k (z+a_k)^{m_k} = Σ_k Σ_j A_{k,j}/(z+a_k)^j"""
    parts = []
    for k, mult in poles.items():
        a_k = representatives[k]
        others = [(representatives[l] - a_k, m_l) for l, m_l in poles.items() if l != k]
        # Taylor coefficients of h(z) = ∏_{l≠k} (z+a_l)^{−m_l} around z = −a_k, via h' = p·h
        coefficients = [math.prod(d ** (-m_l) for d, m_l in others)]
        log_derivative = [
            sum(-m_l * (-1) ** s / d ** (s + 1) for d, m_l in others)
            for s in range(mult - 1)
        ]
        for r in range(1, mult):
            coefficients.append(
                sum(coefficients[i] * log_derivative[r - 1 - i] for i in range(r)) / r
            )
        for j in range(1, mult + 1):
            parts.append((k, j, coefficients[mult - j]))
    return parts

def expand_partial_fractions(network: NetworkConfig,
                             merge_tol: Optional[float] = None,
                             separation_tol: Optional[float] = None,
                             max_relays: Optional[int] = None) -> Expansion:
    """Expand 1 − ∏(1 − g_n) into Σ ς e^{−β(z−1)}/(z+α)^mult for S-DF"""
    merge_tol = app_config.pole_merge_tol if merge_tol is None else merge_tol
    separation_tol = app_config.pole_separation_tol if separation_tol is None else separation_tol
    max_relays = app_config.max_closed_form_relays if max_relays is None else max_relays
    
    if network.size > max_relays:
        raise RelayCountError(
            f"{network.size} relays exceed the closed-form limit of {max_relays}; "
            f"use the quadrature oracle",
            relays=network.size, limit=max_relays,
        )
    
    alphas = [relay.alpha for relay in network.relays]
    representatives, cluster_of = cluster_poles(alphas, merge_tol, separation_tol)
    
    # Identical relays contribute identical subsets; enumerate how many of each group are chosen
    groups: Dict[Tuple[float, float], List[int]] = defaultdict(list)
    for index, relay in enumerate(network.relays):
        groups[(relay.lambda_m, relay.lambda_e)].append(index)
    group_info = [
        (len(members), network.relays[members[0]].lambda_m,
         network.relays[members[0]].alpha, cluster_of[members[0]])
        for members in groups.values()
    ]
    
    accumulated: Dict[Tuple[float, int, int], float] = defaultdict(float)
    for counts in itertools.product(*(range(size + 1) for size, _, _, _ in group_info)):
        chosen = sum(counts)
        if chosen == 0:
            continue
        sign = 1.0 if chosen % 2 == 1 else -1.0
        weight = 1.0
        beta = 0.0
        poles: Dict[int, int] = defaultdict(int)
        for count, (size, lambda_m, alpha, cluster) in zip(counts, group_info):
            if count == 0:
                continue
            weight *= math.comb(size, count) * alpha ** count
            beta += count * lambda_m
            poles[cluster] += count
        for cluster, power, coefficient in principal_parts(dict(poles), representatives):
            accumulated[(beta, cluster, power)] += sign * weight * coefficient
    
    terms = [
        PartialFractionTerm(sigma=sigma, beta=beta, alpha=representatives[cluster], mult=power)
        for (beta, cluster, power), sigma in sorted(accumulated.items())
        if sigma != 0.0
    ]
    logger.expansion_built(network.size, len(terms))
    return Expansion(terms=terms)
