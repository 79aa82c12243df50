import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shortsmooth.contour import (
    QuadConfig,
    build_gamma,
    candidate_curves,
    direct_sigma,
    f_theta_detail,
    gamma0_height,
    gamma0_path,
    gamma_rho_path,
    lambda_floor,
    near_axis_detail,
    perron_detail,
    synthetic_zero_set,
    taylor_kernel,
)
from shortsmooth.errors import ConfigError, DomainError
from shortsmooth.saddle import saddle_point
from shortsmooth.sieve import psi_interval_exact

from helpers import check_path

X, Y, EPS = 10**6, 1000, 0.05


def test_gamma0_junctions():
    p = gamma0_path(X, Y, EPS)
    lower, vert, upper = p.segments
    T0 = gamma0_height(X, Y, EPS)
    a = p.alpha
    assert vert.sigma == a and vert.t_lo == -T0 and vert.t_hi == T0
    assert abs(upper.at_delta(1 - a) - complex(a, T0)) <= 1e-12
    assert abs(lower.at_delta(1 - a) - complex(a, -T0)) <= 1e-12
    assert upper.delta_hi == pytest.approx((1 - EPS) / 2, abs=1e-12)
    assert upper.sigma_at(upper.t_hi) == pytest.approx((1 + EPS) / 2, abs=1e-12)
    assert max(p.junction_gaps()) <= 1e-12


def test_gamma0_degenerate():
    with pytest.raises(DomainError):
        gamma0_path(10**6, 3, EPS)
    with pytest.raises(DomainError):
        gamma0_path(X, Y, 0.3)


def test_gamma_rho_shapes():
    p = gamma_rho_path(100.0, 0.5, Y, EPS)
    assert len(p.segments) == 1 and p.segments[0].sigma == pytest.approx((1 + EPS) / 2)
    q = gamma_rho_path(100.0, 0.3, Y, EPS)
    left, vert, right = q.segments
    assert vert.sigma == pytest.approx(1 - 0.95 * 0.3)
    assert abs(right.at_delta(0.3) - complex(vert.sigma, vert.t_hi)) <= 1e-12
    assert abs(left.at_delta(0.3) - complex(vert.sigma, vert.t_lo)) <= 1e-12
    assert vert.sigma - (1 - 0.3) == pytest.approx(EPS * 0.3)
    with pytest.raises(DomainError):
        gamma_rho_path(1.0, 0.0, Y, EPS)
    with pytest.raises(DomainError):
        gamma_rho_path(1.0, 0.6, Y, EPS)


def test_empty_zero_list():
    H = 10**4
    p = build_gamma([], X, Y, EPS, H)
    srcs = [s.source for s in p.segments]
    assert srcs == ["default", "gamma0", "gamma0", "gamma0", "default"]
    check_path(p, [], EPS, H)


def test_rh_zeros_are_invisible(zeros):
    H = 2000
    p = build_gamma(zeros, X, Y, EPS, H)
    q = build_gamma([], X, Y, EPS, H)
    assert p.segments == q.segments


def test_synthetic_bulge():
    H = 10**4
    pairs = [(50.0, 0.3)]
    p = build_gamma(pairs, X, Y, EPS, H)
    check_path(p, pairs, EPS, H)
    curves = candidate_curves(pairs, X, Y, EPS, H)
    rng = random.Random(3)
    for _ in range(10**4):
        t = rng.uniform(-H, H)
        assert p.sigma_at(t) == direct_sigma(curves, t)
    assert "rho" in {s.source for s in p.segments}


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), k=st.integers(0, 8))
def test_random_configurations(seed, k):
    H = 3000.0
    pairs = synthetic_zero_set(k, H, X, seed)
    p = build_gamma(pairs, X, Y, EPS, H)
    check_path(p, pairs, EPS, H)
    curves = candidate_curves(pairs, X, Y, EPS, H)
    rng = random.Random(seed)
    for _ in range(300):
        t = rng.uniform(-H, H)
        assert p.sigma_at(t) == direct_sigma(curves, t)


def test_zero_order_checked():
    with pytest.raises(DomainError):
        build_gamma([(50.0, 0.3), (20.0, 0.4)], X, Y, EPS, 100)


def test_export_csv(tmp_path):
    p = build_gamma([(50.0, 0.3)], X, Y, EPS, 500)
    out = tmp_path / "path.csv"
    p.export_csv(out, 11)
    lines = out.read_text().splitlines()
    assert lines[0] == "t,sigma" and len(lines) == 12
    t, s = map(float, lines[1].split(","))
    assert t == -500 and s == pytest.approx((1 + EPS) / 2)


def test_lambda_floor():
    v = lambda_floor(10**6)
    assert 0 < v < 0.01
    assert lambda_floor(10**6, c1=0.1) == pytest.approx(2 * v)


def test_taylor_kernel():
    s = complex(0.8, 3.0)
    assert taylor_kernel(s, 1e6, 0.0) == 0
    small = taylor_kernel(s, 1e6, 1e-3)
    assert abs(small) <= abs(cmath.exp(s * math.log(1e6))) * 1e-9 * (1 + 1e-6)
    # |s h/x| = 1
    x = 1e6
    h = x / abs(s)
    naive = ((x + h) ** s - x**s) / s
    assert taylor_kernel(s, x, h) == pytest.approx(naive, rel=1e-10)
    with pytest.raises(DomainError):
        taylor_kernel(0, 10.0, 1.0)


def test_quad_config_validation():
    with pytest.raises(ConfigError):
        QuadConfig(nodes_per_panel=4)
    with pytest.raises(ConfigError):
        QuadConfig(panel_max_width_t=1.0).width(1e6)
    assert QuadConfig().width(1e6) == 0.5 / math.log(1e6)


def test_perron_small_and_symmetric():
    x, h, y, H = 10**4, 200, 30, 2000
    sym = perron_detail(x, h, y, H)
    full = perron_detail(x, h, y, H, QuadConfig(symmetric=False))
    assert full.value == pytest.approx(sym.value, rel=1e-10)
    assert abs(full.imag_residue) <= 1e-8 * abs(full.value)
    exact = psi_interval_exact(x, h, y)
    assert abs(sym.value - exact) <= 20 * x * math.log(x) / H
    assert perron_detail(x, 0, y, H).value == 0.0


def test_perron_domain():
    with pytest.raises(DomainError):
        perron_detail(1000, 10, 30, 1.0)
    with pytest.raises(DomainError):
        perron_detail(1000, 10, 30, 2000.0)


def test_f_theta_symmetry_and_refinement():
    a = f_theta_detail(X, Y, EPS)
    full = f_theta_detail(X, Y, EPS, QuadConfig(symmetric=False))
    assert full.value == pytest.approx(a.value, rel=1e-10)
    assert abs(full.imag_residue) <= 1e-8 * abs(full.value)
    fine = f_theta_detail(X, Y, EPS, QuadConfig().refined(2, X))
    assert abs(fine.value - a.value) <= 1e-6 * abs(a.value)


def test_f_theta_with_synthetic_zero_uses_surviving_pieces():
    base = f_theta_detail(X, Y, EPS)
    cut = f_theta_detail(X, Y, EPS, zeros=[(100.0, 0.2)])
    assert cut.value != base.value
    same = f_theta_detail(X, Y, EPS, zeros=[(10**5, 0.2)])
    assert same.value == pytest.approx(base.value, rel=1e-12)


def test_near_axis():
    x, y = 10**6, 1000
    a = near_axis_detail(x, y)
    full = near_axis_detail(x, y, QuadConfig(symmetric=False))
    assert full.value == pytest.approx(a.value, rel=1e-10)
    vals = [near_axis_detail(x, y, QuadConfig(panel_max_width_t=0.5 / math.log(x) / k)).value
            for k in (1, 2, 4)]
    assert abs(vals[2] - vals[1]) <= abs(vals[1] - vals[0]) + 1e-12 * abs(vals[0])
    assert 0 < a.value < saddle_point(x, y).rankin_value
