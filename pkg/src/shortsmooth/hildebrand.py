"""Large-y estimates built from primes: the density g(x, y) and prime counts.

For y close to x, a non-smooth n in a short interval is p * m with one prime
p > y, so inclusion-exclusion over primes > y combined with a prime count in
short intervals gives Psi(x+h, y) - Psi(x, y) ~ h g(x, y), where

    g(x, y) = 1 + sum_k (-1)^k sum_{P, m} 1 / (P m log(x / (P m)))

runs over unordered sets of k-1 distinct primes > y with product P and
integers m >= 1, P m <= x / y.  Binomial cancellation collapses this to

    g(x, y) = 1 - sum_{r <= x/y, r y-smooth} 1 / (r log(x / r)),

which is the production path; the raw sum is kept as an oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError
from .sieve import (
    _squarefree_products,
    base_primes,
    log_prime_sum,
    prime_count_interval,
    psi_interval_exact,
    smooth_mask_divide,
)

DEFAULT_ENUM_BUDGET = 10**7
RAW_ENUM_BUDGET = 10**6


@dataclass(frozen=True)
class GEstimate:
    value: float
    terms_enumerated: int
    method: str  # "smooth_sum_identity" or "raw_triple_sum"


def _ratio(x: float, y: int) -> int:
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    return math.floor(x / y)


def g_estimate(x: float, y: int, budget: int = DEFAULT_ENUM_BUDGET) -> GEstimate:
    """g(x, y) via the smooth-sum identity."""
    y = int(y)
    R = _ratio(x, y)
    if R > budget:
        raise BudgetError(f"x/y = {R} exceeds enumeration budget {budget}")
    if R < 1:
        return GEstimate(1.0, 0, "smooth_sum_identity")
    r = np.flatnonzero(smooth_mask_divide(0, R, y)).astype(float) + 1
    terms = 1.0 / (r * np.log(x / r))
    return GEstimate(1.0 - math.fsum(terms), int(r.size), "smooth_sum_identity")


def g_estimate_raw(x: float, y: int, budget: int = RAW_ENUM_BUDGET) -> GEstimate:
    """g(x, y) from the literal alternating sum over unordered prime sets."""
    y = int(y)
    R = _ratio(x, y)
    if R > budget:
        raise BudgetError(f"x/y = {R} exceeds raw enumeration budget {budget}")
    if R < 1:
        return GEstimate(1.0, 0, "raw_triple_sum")
    u = math.log(x) / math.log(y)
    big = [int(p) for p in base_primes(R) if p > y]
    blocks = []
    for P, size in [(1, 0), *_squarefree_products(big, R)]:
        k = size + 1
        # y^k > x forces an empty block; the enumerator must never reach it
        assert k <= u + 1e-9, (P, k, u)
        r = P * np.arange(1, R // P + 1, dtype=float)
        blocks.append((-1) ** k / (r * np.log(x / r)))
    terms = np.concatenate(blocks)
    return GEstimate(1.0 + math.fsum(terms), int(terms.size), "raw_triple_sum")


def short_interval_estimate_large_y(x: float, h: float, y: int,
                                    budget: int = DEFAULT_ENUM_BUDGET) -> float:
    """h * g(x, y)."""
    if h < 0:
        raise DomainError("h must be >= 0")
    return h * g_estimate(x, y, budget).value


def prime_density_estimate(x1: float, h1: float) -> float:
    """h1 / log x1."""
    if x1 < 10 or h1 < 10:
        raise DomainError(f"need x1, h1 >= 10, got x1={x1}, h1={h1}")
    return h1 / math.log(x1)


def log_weighted_prime_count(x1: float, h1: float) -> float:
    """(1 / log x1) sum_{x1 < p <= x1 + h1} log p."""
    return log_prime_sum(x1, x1 + h1) / math.log(x1)


def brun_titchmarsh_ratio(x1: float, h1: float) -> float:
    """pi(x1 + h1) - pi(x1) divided by h1 / log h1."""
    if h1 < 2:
        raise DomainError("need h1 >= 2")
    return prime_count_interval(x1, h1) * math.log(h1) / h1


@dataclass(frozen=True)
class BoundaryCase:
    h: int
    exact: int
    integers: int
    primes_above_y: int
    doubled_primes: int

    @property
    def decomposition(self) -> int:
        return self.integers - self.primes_above_y - self.doubled_primes

    @property
    def density(self) -> float:
        return self.exact / self.h


@dataclass(frozen=True)
class BoundaryExample:
    x: int
    y: int
    long: BoundaryCase  # h1 = 2 floor(x^0.9)
    short: BoundaryCase  # h2 = floor(x^0.9)

    @property
    def density_gap(self) -> float:
        return self.short.density - self.long.density

    @property
    def predicted_gap(self) -> float:
        return 1 / (4 * math.log(self.y))

    @property
    def predicted_short_density(self) -> float:
        return 1 - 1 / math.log(self.x)


def _boundary_case(x: int, h: int, y: int, workers: int) -> BoundaryCase:
    exact = psi_interval_exact(x, h, y, workers=workers)
    lo = max(x, y)
    above = prime_count_interval(lo, x + h - lo) if x + h > lo else 0
    # p with 2p in (x, x+h] and p > y
    a, b = max(x // 2, y), (x + h) // 2
    doubled = prime_count_interval(a, b - a) if b > a else 0
    case = BoundaryCase(h, exact, h, above, doubled)
    if case.decomposition != exact:
        raise AssertionError(f"decomposition {case.decomposition} != exact {exact} at h={h}")
    return case


def boundary_example(x: int, workers: int = 1) -> BoundaryExample:
    """Smooth counts in (x, x+h] for y = floor((x + x^0.9)/2) and h in {x^0.9, 2 x^0.9}."""
    x = int(x)
    if x < 16:
        raise DomainError("x must be >= 16")
    h2 = math.floor(x**0.9)
    h1 = 2 * h2
    y = (x + h2) // 2
    short = _boundary_case(x, h2, y, workers)
    if short.doubled_primes != 0:
        raise AssertionError("no doubled primes expected for the short interval")
    return BoundaryExample(x, y, _boundary_case(x, h1, y, workers), short)
