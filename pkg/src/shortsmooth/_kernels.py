"""Compiled inner loops for evaluating log zeta(s, y) at many points.

Both kernels accumulate the Euler product in blocks of ``CHUNK`` factors and
add the logarithms of the block products with Kahan summation.  The
imaginary part of the result is therefore only defined modulo 2*pi; callers
exponentiate it.  Loops run in a fixed order, so results are bit-identical
from run to run.
"""
import math

import numpy as np
from numba import njit

CHUNK = 32
SERIES_CUTOFF = 1e-4


@njit(cache=True)
def _log1m_neg(w):
    # -log(1 - w)
    if abs(w) < SERIES_CUTOFF:
        w2 = w * w
        return w + w2 / 2 + w2 * w / 3 + w2 * w2 / 4
    return -np.log(1 - w)


@njit(cache=True)
def log_zeta_points(s, logp):
    """-sum_p log(1 - p^-s) for every entry of the complex array ``s``."""
    n = s.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        sig = s[i].real
        t = s[i].imag
        acc = 0j
        comp = 0j
        prod = 1 + 0j
        cnt = 0
        for j in range(logp.shape[0]):
            lp = logp[j]
            a = math.exp(-sig * lp)
            w = complex(a * math.cos(t * lp), -a * math.sin(t * lp))
            if a < SERIES_CUTOFF:
                term = _log1m_neg(w)
            else:
                prod *= 1 - w
                cnt += 1
                if cnt < CHUNK:
                    continue
                term = -np.log(prod)
                prod = 1 + 0j
                cnt = 0
            yk = term - comp
            tk = acc + yk
            comp = (tk - acc) - yk
            acc = tk
        if cnt:
            yk = -np.log(prod) - comp
            acc = acc + yk
        out[i] = acc
    return out


@njit(cache=True)
def _vertical_block(logp, amp, sigma, t_start, width, offsets, n_panels):
    """log zeta at sigma + i(t_start + k*width + offsets[j]) for k < n_panels.

    Phases are advanced by one complex rotation per panel instead of
    recomputing exp/cos/sin for every prime and node.  The node index is the
    inner loop (split real/imaginary arrays) so it vectorises.
    """
    P = logp.shape[0]
    m = offsets.shape[0]
    n_big = 0
    while n_big < P and amp[n_big] >= SERIES_CUTOFF:
        n_big += 1  # amp decreases with p, so small factors form a suffix
    out = np.empty((n_panels, m), dtype=np.complex128)
    ph_re = np.empty((P, m))
    ph_im = np.empty((P, m))
    rot_re = np.empty(P)
    rot_im = np.empty(P)
    for q in range(P):
        lp = logp[q]
        rot_re[q] = math.cos(width * lp)
        rot_im[q] = -math.sin(width * lp)
        for j in range(m):
            ang = (t_start + offsets[j]) * lp
            ph_re[q, j] = amp[q] * math.cos(ang)
            ph_im[q, j] = -amp[q] * math.sin(ang)
    pr_re = np.empty(m)
    pr_im = np.empty(m)
    acc = np.empty(m, dtype=np.complex128)
    comp = np.empty(m, dtype=np.complex128)
    for k in range(n_panels):
        for j in range(m):
            pr_re[j] = 1.0
            pr_im[j] = 0.0
            acc[j] = 0j
            comp[j] = 0j
        cnt = 0
        for q in range(n_big):
            rr = rot_re[q]
            ri = rot_im[q]
            for j in range(m):
                wr = ph_re[q, j]
                wi = ph_im[q, j]
                ph_re[q, j] = wr * rr - wi * ri
                ph_im[q, j] = wr * ri + wi * rr
                a = 1.0 - wr
                pr = pr_re[j]
                pi = pr_im[j]
                pr_re[j] = pr * a + pi * wi
                pr_im[j] = pi * a - pr * wi
            cnt += 1
            if cnt == CHUNK or q == n_big - 1:
                for j in range(m):
                    term = -np.log(complex(pr_re[j], pr_im[j]))
                    yk = term - comp[j]
                    tk = acc[j] + yk
                    comp[j] = (tk - acc[j]) - yk
                    acc[j] = tk
                    pr_re[j] = 1.0
                    pr_im[j] = 0.0
                cnt = 0
        for q in range(n_big, P):
            rr = rot_re[q]
            ri = rot_im[q]
            for j in range(m):
                wr = ph_re[q, j]
                wi = ph_im[q, j]
                ph_re[q, j] = wr * rr - wi * ri
                ph_im[q, j] = wr * ri + wi * rr
                term = _log1m_neg(complex(wr, wi))
                yk = term - comp[j]
                tk = acc[j] + yk
                comp[j] = (tk - acc[j]) - yk
                acc[j] = tk
        for j in range(m):
            out[k, j] = acc[j]
    return out


@njit(cache=True)
def _expm1c(z):
    if abs(z) < SERIES_CUTOFF:
        z2 = z * z
        return z + z2 / 2 + z2 * z / 6 + z2 * z2 / 24
    return np.exp(z) - 1


@njit(cache=True)
def perron_panels(logp, sigma, width, offsets, weights, n_panels, logx, log1p_hx, block):
    """Per-panel sums of zeta(s,y) ((x+h)^s - x^s)/s dt over t in [0, n_panels*width].

    ``offsets``/``weights`` are the Gauss-Legendre nodes mapped to [0, width];
    a negative ``width`` (with negated offsets) walks down the lower half line.
    Each block of panels restarts its phases from exact values.
    """
    amp = np.exp(-sigma * logp)
    sums = np.empty(n_panels, dtype=np.complex128)
    k0 = 0
    while k0 < n_panels:
        nb = min(block, n_panels - k0)
        lz = _vertical_block(logp, amp, sigma, k0 * width, width, offsets, nb)
        for k in range(nb):
            acc = 0j
            for j in range(offsets.shape[0]):
                t = k0 * width + k * width + offsets[j]
                s = complex(sigma, t)
                val = np.exp(lz[k, j] + s * logx) * _expm1c(s * log1p_hx) / s
                acc += weights[j] * val
            sums[k0 + k] = acc
        k0 += nb
    return sums


@njit(cache=True)
def vertical_log_zeta(logp, sigma, width, offsets, n_panels, block):
    """log zeta on the panel nodes of a vertical line starting at t = 0."""
    amp = np.exp(-sigma * logp)
    out = np.empty((n_panels, offsets.shape[0]), dtype=np.complex128)
    k0 = 0
    while k0 < n_panels:
        nb = min(block, n_panels - k0)
        out[k0:k0 + nb] = _vertical_block(logp, amp, sigma, k0 * width, width, offsets, nb)
        k0 += nb
    return out
