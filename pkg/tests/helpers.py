"""Shared assertions for contour tests."""
import numpy as np
import pytest


def check_path(path, pairs, eps, H):
    assert max(path.junction_gaps(), default=0.0) <= 1e-12
    assert path.t_lo == -H and path.t_hi == H
    lo, hi = path.sigma_range()
    top = max(path.alpha, 1 - (1 - eps) * path.lambda_floor)
    assert (1 + eps) / 2 - 1e-12 <= lo and hi <= top + 1e-12
    for g, nu in pairs:
        if abs(g) <= H:
            s = path.sigma_at(g)
            assert s >= 1 - (1 - eps) * nu - 1e-12
            assert s > 1 - nu
    for t in np.linspace(0, H, 97):
        assert path.sigma_at(t) == pytest.approx(path.sigma_at(-t), abs=1e-12)
