"""Saddle point alpha(x, y): the unique sigma > 0 minimising x^sigma zeta(sigma, y).

alpha solves F(sigma) = sum_{p <= y} log p / (p^sigma - 1) - log x = 0; F is
strictly decreasing on (0, inf), so a bisection phase followed by
safeguarded Newton steps always converges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .sieve import base_primes, primes_in_range
from .zeta_smooth import log_deriv_real, log_zeta_smooth, prime_logs

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class SaddleResult:
    alpha: float
    rankin_value: float
    residual: float
    iterations: int
    bracket: tuple[float, float]
    log_rankin: float


@dataclass(frozen=True)
class UParam:
    u: float

    @classmethod
    def of(cls, x: float, y: int) -> "UParam":
        return cls(math.log(x) / math.log(y))


def u_param(x: float, y: int) -> float:
    return math.log(x) / math.log(y)


def saddle_function(sigma: float, x: float, y: int) -> float:
    """F(sigma) = sum log p/(p^sigma - 1) - log x."""
    return log_deriv_real(sigma, y) - math.log(x)


def saddle_derivative(sigma: float, y: int) -> float:
    """F'(sigma) = -sum log^2 p * p^sigma / (p^sigma - 1)^2."""
    logp = prime_logs(y)
    w = np.exp(-sigma * logp)
    return -math.fsum(logp * logp * w / (1 - w) ** 2)


def _check(x: float, y: int) -> None:
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")


def saddle_point(x: float, y: int, tol: float = 1e-10, bisect_steps: int = 40,
                 max_newton: int = 60) -> SaddleResult:
    """Solve F(alpha) = 0 to |F| <= tol * log x."""
    x, y = float(x), int(y)
    _check(x, y)
    if tol <= 0:
        raise DomainError("tol must be > 0")
    logx = math.log(x)
    lo, hi = 1.0 / math.log(2 * x), 2.0
    f_lo, f_hi = saddle_function(lo, x, y), saddle_function(hi, x, y)
    while f_lo <= 0:
        lo /= 2
        f_lo = saddle_function(lo, x, y)
    while f_hi >= 0:
        hi *= 2
        f_hi = saddle_function(hi, x, y)
    its = 0
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        f_mid = saddle_function(mid, x, y)
        its += 1
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    f = saddle_function(a, x, y)
    for _ in range(max_newton):
        if abs(f) <= tol * logx:
            break
        step = a - f / saddle_derivative(a, y)
        a = step if lo < step < hi else 0.5 * (lo + hi)
        f = saddle_function(a, x, y)
        its += 1
        if f > 0:
            lo = a
        else:
            hi = a
    if abs(f) > tol * logx:
        raise ConvergenceError(f"saddle point not converged; bracket [{lo}, {hi}], F={f}")
    log_r = a * logx + log_zeta_smooth(a, y).real
    rankin = math.exp(log_r) if log_r < 709 else math.inf
    return SaddleResult(alpha=a, rankin_value=rankin, residual=abs(f), iterations=its, bracket=(lo, hi), log_rankin=log_r)


def saddle_bisection(x: float, y: int, xtol: float = 1e-13) -> float:
    """Independent pure-bisection solve of F(sigma) = 0 (test oracle)."""
    lo, hi = 1e-6, 4.0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if saddle_function(mid, x, y) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def alpha_approx(x: float, y: int) -> float:
    """1 - log(u log(u+1)) / log y, valid for log x < y <= x."""
    if not math.log(x) < y <= x:
        raise DomainError(f"alpha_approx needs log x < y <= x, got x={x}, y={y}")
    u = u_param(x, y)
    return 1.0 - math.log(u * math.log(u + 1)) / math.log(y)


def rankin_bound(x: float, y: int, alpha: float | None = None) -> float:
    """x^alpha zeta(alpha, y) >= Psi(x, y)."""
    if alpha is None:
        return saddle_point(x, y).rankin_value
    return math.exp(alpha * math.log(x) + log_zeta_smooth(alpha, y).real)


def ht_ratio(x: float, y: int, psi: int, alpha: float | None = None) -> float:
    """x^alpha zeta(alpha, y) / (Psi(x, y) sqrt(log x log y))."""
    if psi <= 0:
        raise DomainError("psi must be positive")
    return rankin_bound(x, y, alpha) / (psi * math.sqrt(math.log(x) * math.log(y)))


def mertens_log_sum(x: float) -> float:
    """sum_{p <= x} log p / (p - 1)."""
    x = int(x)
    if x <= 1 << 22:
        p = base_primes(x).astype(float)
        return math.fsum(np.log(p) / (p - 1))
    parts = []
    step = 1 << 22
    for a in range(0, x, step):
        p = primes_in_range(a, min(a + step, x)).astype(float)
        parts.append(math.fsum(np.log(p) / (p - 1)))
    return math.fsum(parts)
