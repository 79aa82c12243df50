"""Riemann zero lists and the truncated explicit formula for Chebyshev psi."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Sequence

import numpy as np

from .errors import DatasetError, DomainError
from .sieve import lambda_interval_sum, prime_count_interval, prime_power_log_sum

FIRST_WINDOW = (14.0, 14.2)


@dataclass(frozen=True)
class ZeroList:
    ordinates: np.ndarray
    source: str
    count: int

    def __post_init__(self):
        self.ordinates.setflags(write=False)

    @property
    def max_ordinate(self) -> float:
        return float(self.ordinates[-1])

    def up_to(self, T: float) -> np.ndarray:
        if T > self.max_ordinate:
            raise DomainError(f"T = {T} exceeds the largest loaded ordinate {self.max_ordinate}")
        return self.ordinates[: np.searchsorted(self.ordinates, T, side="right")]

    def height_of(self, n: int) -> float:
        """Ordinate of the n-th zero (1-based)."""
        return float(self.ordinates[n - 1])


def _parse(line: str, lineno: int, path: str) -> float:
    # Decimal keeps parsing locale-independent and rejects "1,5" style input
    try:
        d = Decimal(line)
    except InvalidOperation:
        raise DatasetError(f"{path}:{lineno}: cannot parse {line!r}") from None
    if not d.is_finite():
        raise DatasetError(f"{path}:{lineno}: non-finite value {line!r}")
    return float(d)


def load_zeros(path: str | os.PathLike, max_count: int | None = None) -> ZeroList:
    """Read ascending zero ordinates, one per line; blank lines and '#' comments are skipped."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise DatasetError(f"zeros file not found: {path}")
    vals: list[float] = []
    prev = -math.inf
    with open(path, encoding="ascii", errors="strict") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            v = _parse(line, lineno, path)
            if not v > 0:
                raise DatasetError(f"{path}:{lineno}: ordinate must be positive, got {line}")
            if not v > prev:
                raise DatasetError(f"{path}:{lineno}: ordinates not strictly ascending ({line} after {prev!r})")
            prev = v
            vals.append(v)
            if max_count is not None and len(vals) >= max_count:
                break
    if not vals:
        raise DatasetError(f"{path}: no zeros")
    lo, hi = FIRST_WINDOW
    if not lo < vals[0] < hi:
        raise DatasetError(f"{path}: first ordinate {vals[0]} outside ({lo}, {hi})")
    arr = np.array(vals, dtype=float)
    return ZeroList(arr, path, len(arr))


def zero_sum(x: float, gammas: np.ndarray) -> float:
    """sum over 0 < gamma of 2 Re(x^rho / rho), rho = 1/2 + i gamma."""
    rho = 0.5 + 1j * gammas
    return 2.0 * math.fsum((np.exp(rho * math.log(x)) / rho).real)


def zero_sum_pairs(x: float, gammas: np.ndarray) -> complex:
    """The same sum taken over rho and conj(rho) separately (pairing check)."""
    rho = np.concatenate([0.5 + 1j * gammas, 0.5 - 1j * gammas])
    terms = np.exp(rho * math.log(x)) / rho
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def chebyshev_psi_explicit(x: float, T: float, zeros: ZeroList) -> float:
    """x - sum_{0<gamma<=T} 2 Re(x^rho/rho) - log(2 pi) - log(1 - x^-2)/2."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    g = zeros.up_to(T)
    return math.fsum([x, -zero_sum(x, g), -math.log(2 * math.pi), -0.5 * math.log1p(-x**-2.0)])


def prime_interval_explicit(x1: float, h1: float, T: float, zeros: ZeroList) -> float:
    """(psi(x1 + h1) - psi(x1)) / log x1 with psi from the explicit formula."""
    if h1 < 0:
        raise DomainError("h1 must be >= 0")
    if h1 == 0:
        return 0.0
    g = zeros.up_to(T)
    diff = math.fsum([h1, -zero_sum(x1 + h1, g), zero_sum(x1, g),
                      -0.5 * math.log1p(-(x1 + h1) ** -2.0), 0.5 * math.log1p(-x1**-2.0)])
    return diff / math.log(x1)


def prime_power_correction(x1: float, h1: float) -> tuple[float, float]:
    """(sum of log p over prime powers p^k in (x1, x1+h1] with k >= 2, bound (log x1)^2 sqrt(x1))."""
    return prime_power_log_sum(x1, x1 + h1, 2), math.log(x1) ** 2 * math.sqrt(x1)


@dataclass(frozen=True)
class ZeroSumRow:
    T: float
    count: int
    inverse_sum: float  # sum_{gamma <= T} 1/|rho|
    density_ratio: float  # N(T) / (T log T)


def zero_sum_decay(x: float, zeros: ZeroList, T_grid: Sequence[float]) -> list[ZeroSumRow]:
    out = []
    for T in T_grid:
        g = zeros.up_to(T)
        inv = math.fsum(1.0 / np.abs(0.5 + 1j * g))
        out.append(ZeroSumRow(float(T), int(g.size), inv, g.size / (T * math.log(T))))
    return out


def explicit_rms(xs: Sequence[float], T: float, zeros: ZeroList, exact: Sequence[float]) -> float:
    err = [chebyshev_psi_explicit(x, T, zeros) - e for x, e in zip(xs, exact)]
    return math.sqrt(math.fsum(e * e for e in err) / len(err))


def interval_comparison(x1: float, h1: float, T: float, zeros: ZeroList) -> dict:
    """Explicit estimate against sieve counts for one interval."""
    est = prime_interval_explicit(x1, h1, T, zeros)
    count = prime_count_interval(x1, h1)
    lam = lambda_interval_sum(x1, h1) / math.log(x1)
    pp, bound = prime_power_correction(x1, h1)
    return {"estimate": est, "count": count, "lambda_weighted": lam,
            "prime_power_log": pp, "prime_power_bound": bound}
