# ABOUTME: Scalar special functions and quadrature kernels for the secrecy closed forms
# ABOUTME: Exponential integrals, scaled E_n, Bessel K1, pole-power integrals and first-hop kernels

import math
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from ..core.exceptions import DomainError, QuadratureError
from ..core.models import QuadratureSpec
from ..shared.logger import get_logger

logger = get_logger(__name__)

_CF_EPS = 1e-16
_CF_MAX_ITER = 10000
_FPMIN = 1e-300

def _require_positive(name: str, x: float):
    if not (x > 0):
        raise DomainError(f"{name} must be positive, got {x}", argument=name, value=x)

def adaptive_quad(func: Callable[[float], float], lower: float, upper: float,
                  quad: Optional[QuadratureSpec] = None, label: str = "integral") -> float:
    """Integrate func over [lower, upper] with QUADPACK, failing loudly on non-convergence"""
    quad = quad or QuadratureSpec()
    kwargs = dict(epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=quad.max_subdivisions,
                  full_output=1)
    result = integrate.quad(func, lower, upper, **kwargs)
    value, abs_error, info = result[0], result[1], result[2]
    if len(result) > 3:
        message = str(result[3])
        roundoff = 'roundoff' in message
        # roundoff with an already tiny error estimate is an acceptable result
        tolerated = max(1e3 * quad.abs_tol, 1e2 * quad.rel_tol * abs(value))
        if not (roundoff and abs_error <= tolerated):
            raise QuadratureError(
                f"Quadrature '{label}' failed: {message.strip().splitlines()[0]}",
                label=label, abs_error=abs_error, max_subdivisions=quad.max_subdivisions,
                details={'value': value, 'lower': lower, 'upper': upper},
            )
    logger.quadrature_result(label, value, abs_error, info.get('neval', 0))
    return value

def exp_integral_e1(x: float) -> float:
    """E1(x) = ∫_x^∞ e^{−t}/t dt"""
    _require_positive("x", x)
    return float(special.exp1(x))

def _scaled_en_continued_fraction(n: int, x: float) -> float:
    """e^x E_n(x) by the modified Lentz continued fraction, x > 1"""
    b = x + n
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAX_ITER + 1):
        an = -i * (n - 1 + i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise DomainError(f"continued fraction for E_{n}({x}) did not converge", argument="x", value=x)

def _scaled_e1_series(x: float) -> float:
    """e^x E1(x) from the convergent power series, 0 < x ≤ 1"""
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        contribution = term / k
        total += contribution
        if abs(contribution) < _CF_EPS * abs(total) or k > 200:
            break
        k += 1
    e1 = -np.euler_gamma - math.log(x) - total
    return math.exp(x) * e1

def scaled_en(n: int, x: float) -> float:
    """e^x E_n(x), free of overflow for large x"""
    if n < 1:
        raise DomainError(f"order must be at least 1, got {n}", argument="n", value=n)
    _require_positive("x", x)
    if math.isinf(x):
        return 0.0
    if x > 1.0:
        return _scaled_en_continued_fraction(n, x)
    # forward recurrence S_{k+1} = (1 − x S_k)/k is stable for x ≤ 1
    value = _scaled_e1_series(x)
    for k in range(1, n):
        value = (1.0 - x * value) / k
    return value

def scaled_e1(x: float) -> float:
    """F_e(x) = e^x E1(x)"""
    return scaled_en(1, x)

def bessel_k1(x: float) -> float:
    """Modified Bessel function of the second kind, order 1"""
    _require_positive("x", x)
    return float(special.k1(x))

def exp_over_pole_power(beta: float, a: float, m: int) -> float:
    """I_m = ∫_0^∞ e^{−βu}/(u+a)^m du"""
    _require_positive("beta", beta)
    _require_positive("a", a)
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}", argument="m", value=m)
    x = beta * a
    if x > 1.0:
        # upward recurrence is stable only for βa ≤ 1
        return a ** (1 - m) * scaled_en(m, x)
    value = scaled_e1(x)
    for k in range(1, m):
        value = (a ** (-k) - beta * value) / k
    return value

@lru_cache(maxsize=4096)
def pole_power_kernel(beta: float, a: float, m: int,
                      quad: Optional[QuadratureSpec] = None) -> float:
    """∫_0^∞ I_m(β/μ, a) e^{−μ} dμ, the first-hop average of exp_over_pole_power"""
    _require_positive("beta", beta)
    _require_positive("a", a)
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}", argument="m", value=m)
    scale = a ** (1 - m)
    x0 = beta * a

    def integrand(mu: float) -> float:
        if mu <= 0.0:
            return 0.0
        return scaled_en(m, x0 / mu) * math.exp(-mu)

    label = f"kernel(beta={beta:.6g}, a={a:.6g}, m={m})"
    # the integrand is O(μ/x0) below μ = x0 and log-like above; split there
    head = adaptive_quad(integrand, 0.0, x0, quad, label=label + "[head]")
    tail = adaptive_quad(integrand, x0, math.inf, quad, label=label + "[tail]")
    return scale * (head + tail)

def asr_kernel(beta: float, quad: Optional[QuadratureSpec] = None) -> float:
    """K(β) = ∫_0^∞ F_e(β/μ) e^{−μ} dμ"""
    return pole_power_kernel(beta, 1.0, 1, quad)
