"""The smooth zeta function zeta(s, y) = prod_{p <= y} (1 - p^-s)^-1 and relatives.

Points s are plain Python complex numbers (``sigma + 1j*t``); real input is
accepted.  Single-point evaluators sum per-prime terms with ``math.fsum``
(exactly rounded, hence independent of summation order).  Batched
evaluation for quadrature lives in :func:`log_zeta_smooth_many`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, SingularityError
from .sieve import BumpWeight, base_primes

SERIES_CUTOFF = 1e-4
SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class EvalConfig:
    prime_limit: int
    compensated_summation: bool = True
    overflow_guard: float = 700.0  # exponents above this stay in log form

    def __post_init__(self):
        if self.prime_limit < 2:
            raise DomainError("prime_limit must be >= 2")


@lru_cache(maxsize=16)
def prime_logs(y: int) -> np.ndarray:
    """log p for all primes p <= y (shared, read-only)."""
    lp = np.log(base_primes(int(y)).astype(float))
    lp.setflags(write=False)
    return lp


def _check_s(s) -> complex:
    s = complex(s)
    if not s.real > 0:
        raise DomainError(f"Re(s) must be > 0, got {s.real}")
    return s


def _check_y(y) -> int:
    y = int(y)
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    return y


def _csum(z: np.ndarray, compensated: bool = True) -> complex:
    if compensated:
        return complex(math.fsum(z.real), math.fsum(z.imag))
    return complex(z.sum())


def _neg_log1m(w: np.ndarray) -> np.ndarray:
    """-log(1 - w) per entry, by series when |w| < 1e-4."""
    out = np.empty_like(w)
    small = np.abs(w) < SERIES_CUTOFF
    ws = w[small]
    w2 = ws * ws
    out[small] = ws + w2 / 2 + w2 * ws / 3 + w2 * w2 / 4
    out[~small] = -np.log(1 - w[~small])
    return out


def _p_pow_neg(s: complex, logp: np.ndarray) -> np.ndarray:
    # p^-s = exp(-sigma log p) * exp(-i t log p); avoids complex overflow paths
    a = np.exp(-s.real * logp)
    ang = s.imag * logp
    return a * (np.cos(ang) - 1j * np.sin(ang))


def log_zeta_smooth(s, y: int, compensated: bool = True) -> complex:
    """-sum_{p <= y} log(1 - p^-s), principal branch per factor."""
    s, y = _check_s(s), _check_y(y)
    return _csum(_neg_log1m(_p_pow_neg(s, prime_logs(y))), compensated)


def zeta_smooth(s, y: int) -> complex:
    return complex(np.exp(log_zeta_smooth(s, y)))


def log_deriv_zeta_smooth(s, y: int) -> complex:
    """-zeta'/zeta(s, y) = sum_{p <= y} log p / (p^s - 1)."""
    s, y = _check_s(s), _check_y(y)
    logp = prime_logs(y)
    w = _p_pow_neg(s, logp)
    one_m = 1 - w
    # |p^s - 1| = |1 - w| / |w|
    if np.any(np.abs(one_m) < SINGULAR_TOL * np.abs(w)):
        raise SingularityError(f"p^s = 1 for some p <= {y} at s = {s}")
    return _csum(logp * w / one_m)


def log_deriv_real(sigma: float, y: int) -> float:
    """Real-axis specialisation of :func:`log_deriv_zeta_smooth`."""
    logp = prime_logs(_check_y(y))
    w = np.exp(-sigma * logp)
    return math.fsum(logp * w / (1 - w))


def lambda_sum(s, z: int) -> complex:
    """sum_{n <= z} Lambda(n) n^-s (finite Dirichlet sum; any complex s)."""
    z = int(z)
    if z < 2:
        raise DomainError(f"z must be >= 2, got {z}")
    s = complex(s)
    primes = base_primes(z)
    logp = prime_logs(z)
    parts = []
    k = 1
    while 2**k <= z:
        root = iroot(z, k)
        sel = logp[: np.searchsorted(primes, root, side="right")]
        parts.append(sel * _p_pow_neg(k * s, sel))
        k += 1
    return _csum(np.concatenate(parts))


def iroot(n: int, k: int) -> int:
    """Largest r with r**k <= n."""
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def zeta_smooth_weighted(s, y: int, kappa: float, weight: Callable | None = None) -> complex:
    """prod_p (1 - W(p/y) p^-s)^-1; factors with p > y(1+kappa) are 1."""
    s, y = _check_s(s), _check_y(y)
    if not 0 < kappa < 1:
        raise DomainError(f"kappa must lie in (0, 1), got {kappa}")
    if kappa * y < 1:
        raise DomainError(f"need kappa*y >= 1, got {kappa * y}")
    weight = BumpWeight(kappa) if weight is None else weight
    primes = base_primes(int(math.floor(y * (1 + kappa))))
    logp = np.log(primes.astype(float))
    w = np.asarray(weight(primes / y), dtype=float) * _p_pow_neg(s, logp)
    return complex(np.exp(_csum(_neg_log1m(w))))


def ratio_decay_profile(x: float, y: int, t_grid: Sequence[float], alpha: float | None = None):
    """|zeta(alpha + it, y)| / zeta(alpha, y) for each t, at the saddle point alpha(x, y)."""
    if alpha is None:
        from .saddle import saddle_point

        alpha = saddle_point(x, y).alpha
    base = log_zeta_smooth(alpha, y).real
    return np.array([math.exp(log_zeta_smooth(complex(alpha, t), y).real - base)
                     for t in t_grid])


def implied_decay_constant(ratio: float, t: float, alpha: float, u: float) -> float:
    """c0 = -log(ratio) (t^2 + (1-alpha)^2) / (u t^2), for reporting only."""
    return -math.log(ratio) * (t * t + (1 - alpha) ** 2) / (u * t * t)


def log_zeta_smooth_many(s: np.ndarray, y: int) -> np.ndarray:
    """log zeta(s, y) for an array of points (imaginary part defined mod 2*pi)."""
    s = np.ascontiguousarray(np.asarray(s, dtype=np.complex128).ravel())
    if s.size and not np.all(s.real > 0):
        raise DomainError("Re(s) must be > 0")
    return _kernels.log_zeta_points(s, np.ascontiguousarray(prime_logs(_check_y(y))))
