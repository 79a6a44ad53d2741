# ABOUTME: Closed-form and quadrature evaluation of relay-selection secrecy metrics
# ABOUTME: Per-relay CDFs (DF exact, AF approximate), selection CDF, average secrecy rate and outage

import math
from typing import Callable, List, Optional

import numpy as np
from scipy import special

from ...core.exceptions import DomainError, PoleClusteringError
from ...core.models import (
    NetworkConfig, RelayLinkParams, Expansion, PartialFractionTerm, QuadratureSpec, Strategy,
    ArrayLike,
)
from ...numerics.specfun import (
    adaptive_quad, asr_kernel, exp_over_pole_power, pole_power_kernel, scaled_e1,
)
from ...shared.config import config as app_config
from ...shared.logger import get_logger
from .partial_fractions import expand_partial_fractions

logger = get_logger(__name__)

_EPS = float(np.finfo(float).eps)
_TINY = float(np.finfo(float).tiny)

def _as_result(value: np.ndarray) -> ArrayLike:
    """Return a Python float for scalar results"""
    return float(value) if np.ndim(value) == 0 else value

def _require_z(z: np.ndarray, lower: float, inclusive: bool):
    bad = np.any(z < lower) if inclusive else np.any(z <= lower)
    if bad or np.any(np.isnan(z)):
        bound = f"≥ {lower}" if inclusive else f"> {lower}"
        raise DomainError(f"z must be {bound}", argument="z", value=z)

def secrecy_rate(z: ArrayLike) -> ArrayLike:
    """Instantaneous secrecy rate: ln z above 1, else 0"""
    z = np.asarray(z, dtype=float)
    _require_z(z, 0.0, inclusive=False)
    return _as_result(np.log(np.maximum(z, 1.0)))

# --- per-relay distributions -------------------------------------------------

def _df_survival(z: np.ndarray, lambda_m: np.ndarray, lambda_e: np.ndarray) -> np.ndarray:
    """1 − F_n(z) of the DF equivalent SNR for z ≥ 1, broadcast over relays on the last axis"""
    z = z[..., np.newaxis]
    return lambda_e * np.exp(-lambda_m * (z - 1.0)) / (lambda_m * z + lambda_e)

def _af_survival(z: np.ndarray, lambda_m: np.ndarray, lambda_e: np.ndarray) -> np.ndarray:
    """1 − F_n(z) of the approximate AF equivalent SNR for z ≥ 1"""
    z = z[..., np.newaxis]
    t = 2.0 * np.sqrt(lambda_m * (z - 1.0))
    safe_t = np.where(t > 0.0, t, 1.0)
    # t·K1(t) → 1 as t → 0
    t_k1 = np.where(t > 0.0, safe_t * special.k1(safe_t), 1.0)
    return lambda_e * t_k1 / (lambda_m * z + lambda_e)

def _selection_survival(survivals: np.ndarray) -> np.ndarray:
    """1 − ∏(1 − g_n) computed without cancellation"""
    return -np.expm1(np.sum(np.log1p(-survivals), axis=-1))

def cdf_z_df(z: ArrayLike, p: RelayLinkParams) -> ArrayLike:
    """CDF of Z_n = (1+γ_RD)/(1+γ_RE) for S-DF, including the z < 1 branch"""
    z = np.asarray(z, dtype=float)
    _require_z(z, 0.0, inclusive=False)
    lm, le = p.lambda_m, p.lambda_e
    upper = 1.0 - le * np.exp(-lm * (np.maximum(z, 1.0) - 1.0)) / (lm * np.maximum(z, 1.0) + le)
    lower_z = np.minimum(z, 1.0)
    lower = np.exp(-le * (1.0 - lower_z) / lower_z) * lm * lower_z / (lm * lower_z + le)
    return _as_result(np.where(z >= 1.0, upper, lower))

def cdf_z_af_approx(z: ArrayLike, p: RelayLinkParams) -> ArrayLike:
    """Approximate CDF of Z_n for S-AF under the product first-hop model"""
    z = np.asarray(z, dtype=float)
    _require_z(z, 1.0, inclusive=True)
    survival = _af_survival(z, np.array([p.lambda_m]), np.array([p.lambda_e]))[..., 0]
    return _as_result(1.0 - survival)

def cdf_selection(z: ArrayLike, network: NetworkConfig, strategy: Strategy) -> ArrayLike:
    """F_max(z) = ∏_n F_n(z)"""
    z = np.asarray(z, dtype=float)
    if strategy is Strategy.SDF:
        per_relay = cdf_z_df
    elif strategy is Strategy.SAF:
        per_relay = cdf_z_af_approx
    else:
        raise DomainError(f"no selection CDF for strategy {strategy.value}", argument="strategy",
                          value=strategy)
    product = np.ones_like(z)
    for relay in network.relays:
        product = product * per_relay(z, relay)
    return _as_result(product)

def _df_cdf_product(z: float, lambda_m: np.ndarray, lambda_e: np.ndarray) -> float:
    """∏ F_n(z) for S-DF at z ≥ 1 from raw rate arrays"""
    return float(np.prod(1.0 - _df_survival(np.asarray(z, dtype=float), lambda_m, lambda_e)))

# --- average secrecy rate -----------------------------------------------------

def _term_integral(term: PartialFractionTerm,
                   first_order: Callable[[float, float], float],
                   pole_integral: Callable[[float, float, int], float]) -> float:
    """ς ∫_0^∞ e^{−βu}/((u+1)(u+1+α)^m) du for one expansion term"""
    beta, alpha, mult = term.beta, term.alpha, term.mult
    if mult == 1:
        return term.sigma / alpha * first_order(beta, beta * (1.0 + alpha))
    # 1/(x(x+α)^m) = α^{−m}/x − Σ_j α^{−(m−j+1)}/(x+α)^j with x = u+1
    value = alpha ** (-mult) * pole_integral(beta, 1.0, 1)
    for j in range(1, mult + 1):
        value -= alpha ** (-(mult - j + 1)) * pole_integral(beta, 1.0 + alpha, j)
    return term.sigma * value

def _guarded_sum(contributions: List[float], label: str) -> float:
    """fsum of expansion contributions, refusing results lost to cancellation"""
    total = math.fsum(contributions)
    magnitude = math.fsum(abs(value) for value in contributions)
    condition = _EPS * magnitude / max(abs(total), _TINY)
    if condition > app_config.cancellation_limit:
        raise PoleClusteringError(
            f"{label}: expansion terms cancel (eps·Σ|terms|/|sum| = {condition:.2e} > "
            f"{app_config.cancellation_limit:g}); poles are too close, use the quadrature oracle",
            details={'condition': condition, 'terms': len(contributions)},
        )
    return total

def asr_df_closed(network: NetworkConfig, expansion: Optional[Expansion] = None) -> float:
    """Closed-form S-DF average secrecy rate"""
    expansion = expansion or expand_partial_fractions(network)
    contributions = [
        _term_integral(term, lambda b1, b2: scaled_e1(b1) - scaled_e1(b2), exp_over_pole_power)
        for term in expansion.terms
    ]
    total = _guarded_sum(contributions, "S-DF closed form")
    logger.debug(f"S-DF closed-form ASR = {total:.12g} ({len(expansion)} terms)")
    return max(total, 0.0)

def asr_af_closed(network: NetworkConfig, quad: Optional[QuadratureSpec] = None,
                  expansion: Optional[Expansion] = None) -> float:
    """Closed-form S-AF average secrecy rate through the first-hop kernel K(β)"""
    quad = quad or app_config.default_quadrature()
    expansion = expansion or expand_partial_fractions(network)
    contributions = [
        _term_integral(
            term,
            lambda b1, b2: asr_kernel(b1, quad) - asr_kernel(b2, quad),
            lambda beta, a, m: pole_power_kernel(beta, a, m, quad),
        )
        for term in expansion.terms
    ]
    total = _guarded_sum(contributions, "S-AF closed form")
    logger.debug(f"S-AF closed-form ASR = {total:.12g} ({len(expansion)} terms)")
    return max(total, 0.0)

# --- quadrature oracle and outage --------------------------------------------

# λ(z − 1) beyond which DF survival underflows, and beyond which AF's t·K1(t) does
_DF_DECAY_SPAN = 800.0
_AF_DECAY_SPAN = 2.0e5

def _outer_quadrature(quad: QuadratureSpec) -> QuadratureSpec:
    """Tolerances for an outer integral whose integrand is itself a quadrature"""
    return QuadratureSpec(abs_tol=max(1e2 * quad.abs_tol, 1e-10),
                          rel_tol=max(1e2 * quad.rel_tol, 1e-8),
                          max_subdivisions=quad.max_subdivisions)

def _survival_integral(survival: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
                       lambda_m: np.ndarray, lambda_e: np.ndarray,
                       quad: QuadratureSpec, label: str) -> float:
    """∫_0^∞ [1 − F_max(e^x)] dx over finite pieces split at the decay knees"""
    def integrand(x: float) -> float:
        z = np.asarray(math.exp(x))
        return float(_selection_survival(survival(z, lambda_m, lambda_e)))

    rate = float(np.min(lambda_m))
    # z = 1 + 1/λ is where the slowest relay starts decaying
    breaks = [0.0, math.log1p(1.0 / rate), math.log1p(_DF_DECAY_SPAN / rate),
              math.log1p(_AF_DECAY_SPAN / rate)]
    return math.fsum(
        adaptive_quad(integrand, lower, upper, quad, label=f"{label}[{piece}]")
        for piece, (lower, upper) in enumerate(zip(breaks, breaks[1:]))
    )

def asr_quadrature_oracle(network: NetworkConfig, strategy: Strategy,
                          quad: Optional[QuadratureSpec] = None,
                          shared_first_hop: bool = True) -> float:
    """Average secrecy rate by direct adaptive quadrature of ∫ [1 − F_max(e^x)] dx"""
    quad = quad or app_config.default_quadrature()
    lambda_m, lambda_e = network.lambda_m, network.lambda_e

    if strategy is Strategy.SDF:
        return _survival_integral(_df_survival, lambda_m, lambda_e, quad, "oracle S-DF")
    if strategy is not Strategy.SAF:
        raise DomainError(f"no oracle for strategy {strategy.value}", argument="strategy",
                          value=strategy)
    if not shared_first_hop:
        return _survival_integral(_af_survival, lambda_m, lambda_e, quad, "oracle S-AF")

    # Conditioned on the common first hop μ, S-AF is S-DF with rates scaled by 1/μ
    def conditional(mu: float) -> float:
        weight = math.exp(-mu)
        if mu <= 0.0 or weight == 0.0:
            return 0.0
        inner = _survival_integral(_df_survival, lambda_m / mu, lambda_e / mu, quad,
                                   "oracle S-AF | mu")
        return inner * weight

    outer = _outer_quadrature(quad)
    # the conditional rate bends where μ reaches the smallest second-hop rate
    knee = min(float(np.min(lambda_m)), 1.0)
    breaks = [0.0, knee, 1.0] if knee < 1.0 else [0.0, 1.0]
    head = math.fsum(
        adaptive_quad(conditional, lower, upper, outer, label=f"oracle S-AF[mu {lower:g}-{upper:g}]")
        for lower, upper in zip(breaks, breaks[1:])
    )
    return head + adaptive_quad(conditional, 1.0, math.inf, outer, label="oracle S-AF[mu tail]")

def outage_probability(network: NetworkConfig, strategy: Strategy, target_rate: float,
                       shared_first_hop: bool = True,
                       quad: Optional[QuadratureSpec] = None) -> float:
    """P_out(R) = F_max(e^R)"""
    if not (target_rate >= 0.0):
        raise DomainError(f"target rate must be non-negative, got {target_rate}",
                          argument="target_rate", value=target_rate)
    z = math.exp(target_rate)
    if strategy is Strategy.SAF and shared_first_hop:
        quad = _outer_quadrature(quad or app_config.default_quadrature())
        lambda_m, lambda_e = network.lambda_m, network.lambda_e

        def conditional(mu: float) -> float:
            if mu <= 0.0:
                # λ/μ → ∞: every relay's equivalent SNR collapses to 1
                return float(np.prod(lambda_m / (lambda_m + lambda_e))) if z == 1.0 else 1.0
            return _df_cdf_product(z, lambda_m / mu, lambda_e / mu) * math.exp(-mu)

        return (adaptive_quad(conditional, 0.0, 1.0, quad, label="outage S-AF[head]")
                + adaptive_quad(conditional, 1.0, math.inf, quad, label="outage S-AF[tail]"))
    return float(cdf_selection(z, network, strategy))
