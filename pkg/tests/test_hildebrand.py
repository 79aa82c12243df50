import math

import pytest
from hypothesis import given, settings, strategies as st

from shortsmooth.errors import BudgetError, DomainError
from shortsmooth.hildebrand import (
    boundary_example,
    brun_titchmarsh_ratio,
    g_estimate,
    g_estimate_raw,
    log_weighted_prime_count,
    prime_density_estimate,
    short_interval_estimate_large_y,
)
from shortsmooth.sieve import prime_count_interval, psi_interval_exact


def test_g_trivial_ranges():
    assert g_estimate(1000, 1001).value == 1.0
    for x, y in [(1000, 501), (1000, 1000), (10**6, 600_000)]:
        assert g_estimate(x, y).value == 1 - 1 / math.log(x)
        assert g_estimate_raw(x, y).value == 1 - 1 / math.log(x)


def test_g_dual_method_example():
    a, b = g_estimate(10**4, 100), g_estimate_raw(10**4, 100)
    assert a.method == "smooth_sum_identity" and b.method == "raw_triple_sum"
    assert abs(a.value - b.value) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(x=st.integers(10, 10**5), y=st.integers(2, 2000))
def test_g_dual_method_property(x, y):
    a, b = g_estimate(x, y), g_estimate_raw(x, y)
    assert abs(a.value - b.value) <= 1e-12
    assert a.value <= 1
    # an exhaustive scan finds nonpositive values only for x <= 38
    if x >= 39:
        assert a.value > 0


def test_g_nonpositive_small_x():
    assert g_estimate(10, 2).value < 0
    assert g_estimate(38, 3).value <= 0


@pytest.mark.parametrize("x", [10**3, 10**4, 10**5])
def test_g_nonincreasing_for_y_above_sqrt_x(x):
    ys = range(x, math.isqrt(x) - 1, -max(1, x // 5000))
    vals = [g_estimate(x, y).value for y in ys]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_g_turns_up_past_u_two():
    # two-prime terms switch on at y < sqrt(x) and push g back up
    assert g_estimate(10**5, 30).value > g_estimate(10**5, 100).value


def test_g_budget_and_domain():
    with pytest.raises(BudgetError):
        g_estimate(10**9, 10, budget=10**6)
    with pytest.raises(DomainError):
        g_estimate(100, 1)


def test_short_interval_estimate():
    assert short_interval_estimate_large_y(1000, 0, 10) == 0
    # y > x + h: everything is smooth
    assert abs(short_interval_estimate_large_y(1000, 50, 2000) - psi_interval_exact(1000, 50, 2000)) <= 1
    est = short_interval_estimate_large_y(10**6, 10**4, 10**5)
    exact = psi_interval_exact(10**6, 10**4, 10**5)
    assert abs(est / exact - 1) < 0.05


def test_prime_density():
    assert prime_density_estimate(10**6, 10**4) == pytest.approx(723.824, abs=1e-3)
    assert prime_density_estimate(10**6, 2 * 10**4) == 2 * prime_density_estimate(10**6, 10**4)
    count = prime_count_interval(10**6, 10**4)
    assert abs(count / prime_density_estimate(10**6, 10**4) - 1) < 0.05
    with pytest.raises(DomainError):
        prime_density_estimate(5, 100)


def test_log_weighted_count():
    x1, h1 = 10**6, 10**4
    diff = abs(log_weighted_prime_count(x1, h1) - prime_count_interval(x1, h1))
    lx = math.log(x1)
    assert diff <= h1**2 / (x1 * lx**2) + math.sqrt(x1) * lx**2 / lx


def test_brun_titchmarsh_ratio():
    assert brun_titchmarsh_ratio(10**5, 1000) <= 4


def test_boundary_example_identity():
    b = boundary_example(10**6)
    assert b.y == math.floor((10**6 + (10**6) ** 0.9) / 2)
    assert b.short.h == math.floor((10**6) ** 0.9) and b.long.h == 2 * b.short.h
    for case in (b.short, b.long):
        assert case.exact == case.integers - case.primes_above_y - case.doubled_primes
    assert b.short.doubled_primes == 0
    assert b.long.doubled_primes > 0
    assert b.density_gap > 0
