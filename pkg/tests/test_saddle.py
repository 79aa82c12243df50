import math

import pytest
from hypothesis import given, settings, strategies as st

from shortsmooth.errors import DomainError
from shortsmooth.saddle import (
    alpha_approx,
    ht_ratio,
    mertens_log_sum,
    rankin_bound,
    saddle_bisection,
    saddle_derivative,
    saddle_function,
    saddle_point,
    u_param,
)
from shortsmooth.sieve import psi_exact


def test_residual_and_oracle():
    r = saddle_point(10**6, 1000)
    assert 0 < r.alpha < 1
    assert r.residual <= 1e-10 * math.log(10**6)
    assert r.alpha == pytest.approx(saddle_bisection(10**6, 1000), abs=1e-10)


def test_bracket_signs():
    r = saddle_point(10**7, 300)
    lo, hi = r.bracket
    assert saddle_function(lo, 10**7, 300) > 0 > saddle_function(hi, 10**7, 300)


@settings(max_examples=50, deadline=None)
@given(lx=st.floats(1.0, 22.0), y=st.integers(2, 10**5))
def test_residual_property(lx, y):
    x = math.exp(lx)
    if y > 2 * x:
        y = max(2, int(2 * x))
    r = saddle_point(x, y)
    assert r.residual <= 1e-10 * math.log(x)
    assert 0 < r.alpha < 2


def test_decreasing_in_x():
    alphas = [saddle_point(10**k, 500).alpha for k in range(3, 12)]
    assert all(a > b for a, b in zip(alphas, alphas[1:]))


def test_derivative_matches_finite_difference():
    s, y, x = 0.7, 1000, 1e8
    d = (saddle_function(s + 1e-6, x, y) - saddle_function(s - 1e-6, x, y)) / 2e-6
    assert d == pytest.approx(saddle_derivative(s, y), rel=1e-6)


def test_extended_range_y_above_x():
    r = saddle_point(1000, 1999)
    assert r.residual <= 1e-10 * math.log(1000)


@pytest.mark.parametrize("x,y", [(100, 3), (10, 2), (10**5, 50), (50, 60)])
def test_rankin(x, y):
    assert psi_exact(x, y) <= rankin_bound(x, y)


def test_rankin_values_from_examples():
    assert rankin_bound(100, 3) >= 20
    assert rankin_bound(10, 2) >= 4


def test_minimiser():
    x, y = 10**7, 200
    r = saddle_point(x, y)
    for d in (-1e-2, -1e-3, 1e-3, 1e-2):
        assert rankin_bound(x, y, r.alpha + d) >= r.rankin_value * (1 - 1e-9)


def test_alpha_approx():
    y = 1000
    assert alpha_approx(y, y) == pytest.approx(1 - math.log(math.log(2)) / math.log(y))
    assert alpha_approx(y, y) > 1
    with pytest.raises(DomainError):
        alpha_approx(10**8, 10)
    a = saddle_point(10**8, 1000).alpha
    u = u_param(10**8, 1000)
    assert abs((1 - a) * math.log(1000) - math.log(u * math.log(u + 1))) <= 4
    # fixed u, growing y
    vals = [alpha_approx(y**3, y) for y in (10**2, 10**4, 10**8, 10**16)]
    assert all(a < b for a, b in zip(vals, vals[1:])) and 1 - vals[-1] < 0.1


def test_ht_ratio():
    x, y = 10**7, 100
    psi = psi_exact(x, y)
    v = ht_ratio(x, y, psi)
    assert 1 / math.sqrt(math.log(x) * math.log(y)) <= v <= 10
    with pytest.raises(DomainError):
        ht_ratio(x, y, 0)


def test_mertens_sum_small():
    primes = [2, 3, 5, 7]
    direct = math.fsum(math.log(p) / (p - 1) for p in primes)
    assert mertens_log_sum(10) == pytest.approx(direct, rel=1e-15)
