"""Exact integer-side counts: primes, smooth numbers, von Mangoldt sums.

Two independent smoothness strategies are provided:

* ``"spf"``: a smallest-prime-factor table on ``[0, N]`` from which the
  largest prime factor of every ``n <= N`` is recovered by the recursion
  ``P(n) = max(spf(n), P(n // spf(n)))``.  Used for long-range counts while
  ``N`` fits the table budget.
* ``"divide"``: a segmented sieve that divides every ``n`` in ``(lo, hi]`` by
  all primes ``p <= min(y, sqrt(hi))`` (with multiplicity); ``n`` is y-smooth
  iff the remaining cofactor is ``<= y``.  Used for short intervals and for
  long ranges beyond the table budget.

All counts are exact integers and segment totals are reduced by addition,
so the result does not depend on how many workers evaluate the segments.
"""
from __future__ import annotations

import csv
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetError, DomainError


@dataclass(frozen=True)
class SieveBudget:
    segment_length: int = 1 << 22
    max_x: int = 10**10
    exhaustive_max: int = 10**6
    spf_table_limit: int = 10**7


DEFAULT_BUDGET = SieveBudget()


# ---------------------------------------------------------------------------
# primes


def _simple_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    return _simple_primes(limit)


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit (cached; callers must not mutate the result)."""
    limit = int(limit)
    # round the cache key up so that nearby limits share one table
    key = 1 << max(limit, 2).bit_length()
    p = _base_primes(key)
    return p[: np.searchsorted(p, limit, side="right")]


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray = field(repr=False)

    @property
    def logs(self) -> np.ndarray:
        return np.log(self.primes.astype(float))

    def __len__(self) -> int:
        return len(self.primes)


def primes_in_range(lo: int, hi: int, budget: SieveBudget = DEFAULT_BUDGET) -> np.ndarray:
    """Primes p with lo < p <= hi, via a segmented Eratosthenes sieve."""
    lo, hi = max(int(lo), 0), int(hi)
    if hi <= lo or hi < 2:
        return np.zeros(0, dtype=np.int64)
    if hi > budget.max_x:
        raise BudgetError(f"prime sieve up to {hi} exceeds max_x={budget.max_x}")
    if hi <= budget.segment_length:
        p = base_primes(hi)
        return p[p > lo]
    small = base_primes(math.isqrt(hi))
    out = []
    for a, b in _segments(lo, hi, budget.segment_length):
        out.append(_eratosthenes_segment(a, b, small))
    return np.concatenate(out)


def prime_table(limit: int, budget: SieveBudget = DEFAULT_BUDGET) -> PrimeTable:
    limit = int(limit)
    return PrimeTable(limit, primes_in_range(0, limit, budget))


def _segments(lo: int, hi: int, length: int) -> list[tuple[int, int]]:
    return [(a, min(a + length, hi)) for a in range(lo, hi, length)]


def _first_index(lo: int, step: int) -> int:
    """Index into a segment (lo, hi] of the first multiple of ``step``."""
    return (-(lo + 1)) % step


def _eratosthenes_segment(lo: int, hi: int, small: np.ndarray) -> np.ndarray:
    flags = np.ones(hi - lo, dtype=bool)  # flags[i] <-> n = lo + 1 + i
    if lo == 0:
        flags[0] = False
    for p in small:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, (lo // p + 1) * p)
        flags[start - lo - 1 :: p] = False
    return np.flatnonzero(flags).astype(np.int64) + lo + 1


# ---------------------------------------------------------------------------
# smallest / largest prime factor


@dataclass(frozen=True)
class SpfSegment:
    """Smallest prime factor of every n in (lo, hi]; ``spf[i]`` belongs to n = lo+1+i.

    By convention spf(1) = 1.
    """

    lo: int
    hi: int
    spf: np.ndarray = field(repr=False)

    def __getitem__(self, n: int) -> int:
        if not self.lo < n <= self.hi:
            raise IndexError(n)
        return int(self.spf[n - self.lo - 1])

    @property
    def numbers(self) -> np.ndarray:
        return np.arange(self.lo + 1, self.hi + 1, dtype=np.int64)


def spf_segment(lo: int, hi: int) -> SpfSegment:
    lo, hi = int(lo), int(hi)
    if not 0 <= lo < hi:
        raise DomainError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    dtype = np.int32 if hi < 2**31 else np.int64
    spf = np.arange(lo + 1, hi + 1, dtype=dtype)
    small = base_primes(math.isqrt(hi))
    # descending so the smallest prime is written last
    for p in small[::-1]:
        p = int(p)
        start = max(2 * p, (lo // p + 1) * p)
        if start <= hi:
            spf[start - lo - 1 :: p] = p
    return SpfSegment(lo, hi, spf)


def _build_lpf_table(limit: int) -> np.ndarray:
    spf = spf_segment(0, limit).spf
    # prepend index 0 so that table[n] corresponds to n
    spf = np.concatenate([np.zeros(1, dtype=spf.dtype), spf])
    lpf = spf.copy()
    b = 2
    while b <= limit:
        idx = np.arange(b, min(2 * b, limit + 1))
        lpf[idx] = np.maximum(spf[idx], lpf[idx // spf[idx]])
        b *= 2
    lpf.setflags(write=False)
    return lpf


_LPF_CACHE: list[np.ndarray] = []


def _lpf_table(limit: int) -> np.ndarray:
    # keep only the largest table built so far; smaller limits get a view of it
    if _LPF_CACHE and len(_LPF_CACHE[0]) > limit:
        return _LPF_CACHE[0][: limit + 1]
    table = _build_lpf_table(limit)
    _LPF_CACHE[:] = [table]
    return table


def largest_prime_factor_table(limit: int) -> np.ndarray:
    """Array ``P`` with ``P[n]`` the largest prime factor of n (P[1] = 1, P[0] = 0)."""
    return _lpf_table(int(limit))


# ---------------------------------------------------------------------------
# smoothness masks


def smooth_mask_divide(lo: int, hi: int, y: int) -> np.ndarray:
    """Boolean mask over (lo, hi]: True where n is y-smooth (divide-out strategy)."""
    n = np.arange(lo + 1, hi + 1, dtype=np.float64)  # exact below 2**53
    rem = n.copy()
    for p in base_primes(min(int(y), math.isqrt(hi))):
        p = int(p)
        pk = p
        while pk <= hi:
            i = _first_index(lo, pk)
            if i < hi - lo:
                rem[i::pk] /= p
            pk *= p
    return rem <= y


def weighted_segment(lo: int, hi: int, y: int, kappa: float, weight: Callable) -> float:
    """Sum over n in (lo, hi] of prod W(p/y)^a over n = prod p^a."""
    y1 = y * (1.0 + kappa)
    rem = np.arange(lo + 1, hi + 1, dtype=np.float64)
    logw = np.zeros(hi - lo)
    for p in base_primes(min(int(y1), math.isqrt(hi))):
        p = int(p)
        w = float(weight(p / y))
        lw = math.log(w) if w > 0 else -math.inf
        pk = p
        while pk <= hi:
            i = _first_index(lo, pk)
            if i < hi - lo:
                rem[i::pk] /= p
                if p > y:
                    logw[i::pk] += lw
            pk *= p
    big = rem > y1
    rem[big] = 1.0
    w_rem = np.asarray(weight(rem / y), dtype=float)
    with np.errstate(divide="ignore"):
        vals = np.exp(logw) * w_rem
    vals[big] = 0.0
    return math.fsum(vals)


# ---------------------------------------------------------------------------
# counting


def _check_count_args(x: int, y: int, budget: SieveBudget) -> None:
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if x > budget.max_x:
        raise BudgetError(f"x={x} exceeds sieve budget max_x={budget.max_x}")


def _run(func: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [func(*it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, *zip(*items)))


def _count_divide(lo: int, hi: int, y: int) -> int:
    return int(np.count_nonzero(smooth_mask_divide(lo, hi, y)))


def count_smooth_divide(lo: int, hi: int, y: int, budget: SieveBudget = DEFAULT_BUDGET,
                        workers: int = 1) -> int:
    """Number of y-smooth n in (lo, hi] by the segmented divide-out sieve."""
    if hi <= lo:
        return 0
    segs = [(a, b, y) for a, b in _segments(lo, hi, budget.segment_length)]
    return sum(_run(_count_divide, segs, workers))


def count_smooth_spf(x: int, y: int, budget: SieveBudget = DEFAULT_BUDGET) -> int:
    """Psi(x, y) from the largest-prime-factor table (x <= spf_table_limit)."""
    if x > budget.spf_table_limit:
        raise BudgetError(f"x={x} exceeds spf_table_limit={budget.spf_table_limit}")
    if x < 1:
        return 0
    limit = max(x, min(budget.spf_table_limit, 1 << max(x, 2).bit_length()))
    lpf = largest_prime_factor_table(limit)
    return int(np.count_nonzero(lpf[1 : x + 1] <= y))


def psi_strategy(x: int, budget: SieveBudget = DEFAULT_BUDGET) -> str:
    return "spf" if x <= budget.spf_table_limit else "divide"


def psi_exact(x: int, y: int, budget: SieveBudget = DEFAULT_BUDGET, strategy: str = "auto",
              workers: int = 1) -> int:
    """Psi(x, y) = #{1 <= n <= x : n is y-smooth}; n = 1 counts as smooth."""
    x, y = int(x), int(y)
    _check_count_args(x, y, budget)
    if x < 1:
        return 0
    if y >= x:
        return x
    if strategy == "auto":
        strategy = psi_strategy(x, budget)
    if strategy == "spf":
        return count_smooth_spf(x, y, budget)
    if strategy == "divide":
        return count_smooth_divide(0, x, y, budget, workers)
    raise DomainError(f"unknown strategy {strategy!r}")


def psi_interval_exact(x: int, h: int, y: int, budget: SieveBudget = DEFAULT_BUDGET,
                       strategy: str = "divide", workers: int = 1) -> int:
    """Psi(x+h, y) - Psi(x, y); only (x, x+h] is sieved by default."""
    x, h, y = int(x), int(h), int(y)
    if h < 0:
        raise DomainError(f"h must be >= 0, got {h}")
    _check_count_args(x + h, y, budget)
    if h == 0:
        return 0
    if strategy == "divide":
        return count_smooth_divide(x, x + h, y, budget, workers)
    if strategy == "spf":
        return count_smooth_spf(x + h, y, budget) - count_smooth_spf(x, y, budget)
    raise DomainError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# weighted count


def smooth_step(t):
    """The standard C-infinity transition f(s) = exp(-1/s) for s > 0, else 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


@dataclass(frozen=True)
class BumpWeight:
    """W(t) = 1 on (0, 1], 0 on [1+kappa, inf), smooth monotone transition between."""

    kappa: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a = smooth_step((1.0 + self.kappa - t) / self.kappa)
        b = smooth_step((t - 1.0) / self.kappa)
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(t <= 1.0, 1.0, np.where(t >= 1.0 + self.kappa, 0.0, a / (a + b)))
        return w if w.ndim else float(w)


def psi_weighted_exact(x: int, y: int, kappa: float, weight: Callable | None = None,
                       budget: SieveBudget = DEFAULT_BUDGET) -> float:
    """Psi_W(x, y): weighted count of y(1+kappa)-smooth n <= x."""
    x, y = int(x), int(y)
    if not 0 < kappa < 1:
        raise DomainError(f"kappa must lie in (0, 1), got {kappa}")
    if kappa * y < 1:
        raise DomainError(f"need kappa*y >= 1, got kappa*y = {kappa * y}")
    _check_count_args(x, y, budget)
    weight = BumpWeight(kappa) if weight is None else weight
    return math.fsum(weighted_segment(a, b, y, kappa, weight)
                     for a, b in _segments(0, x, budget.segment_length))


# ---------------------------------------------------------------------------
# inclusion-exclusion oracle


def _squarefree_products(primes: Sequence[int], limit: int):
    """Yield (product, size) for every nonempty set of distinct primes with product <= limit."""
    stack = [(0, 1, 0)]
    while stack:
        start, prod, k = stack.pop()
        for i in range(start, len(primes)):
            q = prod * primes[i]
            if q > limit:
                break
            yield q, k + 1
            stack.append((i + 1, q, k + 1))


def inclusion_exclusion_interval(x: int, h: int, y: int,
                                 budget: SieveBudget = DEFAULT_BUDGET) -> int:
    """Count y-smooth n in (x, x+h] by inclusion-exclusion over sets of primes > y.

    Evaluates h + sum_k (-1)^k #{(S, m): S a k-set of distinct primes > y,
    x < prod(S) m <= x + h} with S unordered.
    """
    x, h, y = int(x), int(h), int(y)
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if h < 0:
        raise DomainError(f"h must be >= 0, got {h}")
    if x + h > budget.exhaustive_max:
        raise BudgetError(f"x+h={x + h} exceeds exhaustive_max={budget.exhaustive_max}")
    top = x + h
    if top <= y:
        return h
    prods, signs = _signed_products(y, 1 << (top - 1).bit_length())
    # products above x + h contribute 0, so a cached superset is exact
    return h + int(np.dot(signs, top // prods - x // prods))


@lru_cache(maxsize=64)
def _signed_products(y: int, limit: int) -> tuple[np.ndarray, np.ndarray]:
    big = [int(p) for p in base_primes(limit) if p > y]
    out = list(_squarefree_products(big, limit))
    prods = np.array([q for q, _ in out], dtype=np.int64)
    signs = np.array([-1 if k % 2 else 1 for _, k in out], dtype=np.int64)
    return prods, signs


# ---------------------------------------------------------------------------
# primes in intervals, von Mangoldt sums


def _count_primes_eratosthenes(lo: int, hi: int) -> int:
    return len(_eratosthenes_segment(lo, hi, base_primes(math.isqrt(hi))))


def _count_primes_spf(lo: int, hi: int) -> int:
    seg = spf_segment(lo, hi)
    n = seg.numbers
    return int(np.count_nonzero((seg.spf == n) & (n >= 2)))


def prime_count_interval(x1: float, h1: float, method: str = "eratosthenes",
                         budget: SieveBudget = DEFAULT_BUDGET, workers: int = 1) -> int:
    """#{p prime : x1 < p <= x1 + h1}."""
    if x1 < 0 or h1 < 0:
        raise DomainError("x1 and h1 must be >= 0")
    lo, hi = math.floor(x1), math.floor(x1 + h1)
    if hi > budget.max_x:
        raise BudgetError(f"x1+h1={hi} exceeds max_x={budget.max_x}")
    if hi <= lo:
        return 0
    func = {"eratosthenes": _count_primes_eratosthenes, "spf": _count_primes_spf}[method]
    return sum(_run(func, _segments(lo, hi, budget.segment_length), workers))


def prime_power_log_sum(lo: float, hi: float, min_k: int = 2,
                        budget: SieveBudget = DEFAULT_BUDGET) -> float:
    """Sum of log p over prime powers lo < p^k <= hi with k >= min_k."""
    lo, hi = math.floor(lo), math.floor(hi)
    terms = []
    k = min_k
    while 2**k <= hi:
        root = int(round(hi ** (1.0 / k))) + 1
        for p in base_primes(root):
            pk = int(p) ** k
            if lo < pk <= hi:
                terms.append(math.log(p))
        k += 1
    return math.fsum(terms)


def log_prime_sum(lo: float, hi: float, budget: SieveBudget = DEFAULT_BUDGET) -> float:
    """Sum of log p over primes lo < p <= hi."""
    lo, hi = math.floor(lo), math.floor(hi)
    parts = [math.fsum(np.log(_eratosthenes_segment(a, b, base_primes(math.isqrt(b)))
                              .astype(float)))
             for a, b in _segments(max(lo, 0), hi, budget.segment_length)]
    return math.fsum(parts)


def lambda_exact_sum(x: float, budget: SieveBudget = DEFAULT_BUDGET) -> float:
    """Chebyshev psi(x) = sum_{n <= x} Lambda(n), computed exactly from a prime sieve."""
    if x > budget.max_x:
        raise BudgetError(f"x={x} exceeds max_x={budget.max_x}")
    if x < 2:
        return 0.0
    return math.fsum([log_prime_sum(0, x, budget), prime_power_log_sum(0, x, 2, budget)])


def lambda_interval_sum(x1: float, h1: float, budget: SieveBudget = DEFAULT_BUDGET) -> float:
    """sum_{x1 < n <= x1 + h1} Lambda(n)."""
    return math.fsum([log_prime_sum(x1, x1 + h1, budget),
                      prime_power_log_sum(x1, x1 + h1, 2, budget)])


# ---------------------------------------------------------------------------
# count cache


class CountCache:
    """Append-only CSV cache of exact counts with header ``x,y,h,count``."""

    header = ["x", "y", "h", "count"]

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self._data: dict[tuple[int, int, int], int] = {}
        if os.path.exists(self.path) and os.path.getsize(self.path) > 0:
            with open(self.path, newline="") as fh:
                rows = csv.reader(fh)
                head = next(rows)
                if head != self.header:
                    raise ValueError(f"{self.path}: bad cache header {head}")
                for row in rows:
                    if row:
                        x, y, h, c = map(int, row)
                        self._data[(x, y, h)] = c

    def snapshot(self) -> dict[tuple[int, int, int], int]:
        return dict(self._data)

    def get(self, x: int, y: int, h: int) -> int | None:
        return self._data.get((int(x), int(y), int(h)))

    def put(self, x: int, y: int, h: int, count: int) -> None:
        key = (int(x), int(y), int(h))
        if key in self._data:
            return
        new = not os.path.exists(self.path) or os.path.getsize(self.path) == 0
        with open(self.path, "a", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if new:
                w.writerow(self.header)
            w.writerow([*key, int(count)])
        self._data[key] = int(count)

    def __len__(self) -> int:
        return len(self._data)


def cached_count(cache: CountCache | None, x: int, y: int, h: int,
                 compute: Callable[[], int]) -> int:
    if cache is None:
        return compute()
    hit = cache.get(x, y, h)
    if hit is not None:
        return hit
    val = compute()
    cache.put(x, y, h, val)
    return val


def trial_division_smooth(n: int, y: int) -> bool:
    """Reference predicate by trial division (slow; used by tests and small oracles)."""
    for p in itertools.chain([2], range(3, math.isqrt(n) + 1, 2)):
        while n % p == 0:
            if p > y:
                return False
            n //= p
        if p * p > n:
            break
    return n <= y or n == 1


def iter_smooth(limit: int, primes: Iterable[int]) -> np.ndarray:
    """All integers <= limit composed only of the given primes (1 included), sorted."""
    vals = np.array([1], dtype=np.int64)
    for p in primes:
        p = int(p)
        parts = [vals]
        cur = vals
        while True:
            cur = cur[cur <= limit // p] * p
            if cur.size == 0:
                break
            parts.append(cur)
        vals = np.concatenate(parts)
    return np.sort(vals)
