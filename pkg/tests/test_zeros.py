import math

import numpy as np
import pytest

from shortsmooth.errors import DatasetError, DomainError
from shortsmooth.sieve import lambda_exact_sum, prime_count_interval
from shortsmooth.zeros import (
    chebyshev_psi_explicit,
    load_zeros,
    prime_interval_explicit,
    zero_sum,
    zero_sum_decay,
    zero_sum_pairs,
)

# first ordinates, from an independent high-precision evaluation
FIRST = [14.134725141734693, 21.022039638771555, 25.010857580145688]


def write(tmp_path, text, name="z.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_two(tmp_path):
    z = load_zeros(write(tmp_path, "14.134725141734\n21.022039638771\n"))
    assert z.count == 2 and z.ordinates[1] == pytest.approx(21.022039638771)


def test_load_truncates(tmp_path):
    z = load_zeros(write(tmp_path, "\n".join(map(str, FIRST)) + "\n"), max_count=2)
    assert z.count == 2


@pytest.mark.parametrize("text,msg", [
    ("", "no zeros"),
    ("14.13\n13.9\n", ":2:"),
    ("14.13\n21.0\n21.0\n", ":3:"),
    ("14.13\nabc\n", ":2:"),
    ("14.13\nnan\n", ":2:"),
    ("14.13\ninf\n", ":2:"),
    ("14,13\n", ":1:"),
    ("15.0\n", "outside"),
    ("-14.1\n", ":1:"),
])
def test_load_errors(tmp_path, text, msg):
    with pytest.raises(DatasetError, match=msg):
        load_zeros(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(DatasetError):
        load_zeros(tmp_path / "nope.txt")


def test_dataset_gate(zeros):
    assert 14.0 < zeros.ordinates[0] < 14.2
    assert np.all(np.diff(zeros.ordinates) > 0)
    assert zeros.ordinates[:3] == pytest.approx(FIRST, abs=1e-9)
    assert zeros.count >= 2000


def test_empty_zero_sum(zeros):
    x = 1000.0
    want = x - math.log(2 * math.pi) - 0.5 * math.log(1 - x**-2)
    assert chebyshev_psi_explicit(x, 10.0, zeros) == pytest.approx(want, rel=1e-15)


def test_pairing(zeros):
    g = zeros.ordinates[:500]
    both = zero_sum_pairs(1e4, g)
    assert both.real == pytest.approx(zero_sum(1e4, g), rel=1e-12)
    assert abs(both.imag) <= 1e-9


def test_explicit_psi_small(zeros):
    T = zeros.height_of(2000)
    assert abs(chebyshev_psi_explicit(1e4, T, zeros) - lambda_exact_sum(1e4)) <= 10


def test_T_beyond_dataset(zeros):
    with pytest.raises(DomainError):
        chebyshev_psi_explicit(1e4, zeros.max_ordinate + 1, zeros)


def test_interval_explicit(zeros):
    assert prime_interval_explicit(1e6, 0, 100.0, zeros) == 0.0
    est = prime_interval_explicit(1e5, 2000, zeros.height_of(2000), zeros)
    assert abs(est / prime_count_interval(1e5, 2000) - 1) < 0.05


def test_zero_counts(zeros):
    rows = zero_sum_decay(1e6, zeros, [20, 50, 100, 200, 500, 1000])
    counts = [r.count for r in rows]
    assert counts[2] == 29
    assert counts == sorted(counts)
    assert all(r.density_ratio <= 1 for r in rows)
    assert all(a.inverse_sum <= b.inverse_sum for a, b in zip(rows, rows[1:]))
