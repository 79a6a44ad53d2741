# ABOUTME: High-precision reference values for relay-secrecy tests
# ABOUTME: mpmath evaluations of the special functions and integrals under test

import mpmath

mpmath.mp.dps = 30

def mp_scaled_en(n: int, x: float) -> float:
    """e^x E_n(x)"""
    return float(mpmath.exp(x) * mpmath.expint(n, x))

def mp_pole_power(beta: float, a: float, m: int) -> float:
    """∫_0^∞ e^{−βu}/(u+a)^m du"""
    return float(mpmath.quad(lambda u: mpmath.exp(-beta * u) / (u + a) ** m, [0, 1, mpmath.inf]))

def mp_asr_kernel(beta: float) -> float:
    """∫_0^∞ e^{β/μ}E1(β/μ) e^{−μ} dμ"""
    def integrand(mu):
        if mu == 0:
            return mpmath.mpf(0)
        x = beta / mu
        return mpmath.exp(x) * mpmath.e1(x) * mpmath.exp(-mu)
    return float(mpmath.quad(integrand, [0, beta, mpmath.inf]))
