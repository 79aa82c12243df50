"""Compute ordinates of the first N nontrivial zeta zeros and write them one per line.

Zeros are bracketed by sign changes of the Hardy Z-function (Riemann-Siegel
main sum plus the first correction term, vectorized with numpy), then each
bracket is polished with a few secant steps on mpmath.siegelz.  Below
t = 200 the scan uses mpmath directly.

    python scripts/generate_zeros.py --count 10000 --output data/zeros.txt
"""
import argparse
import math
import sys

import mpmath
import numpy as np

SMALL_T = 200.0


def theta(t):
    t = np.asarray(t, dtype=float)
    return (t / 2) * np.log(t / (2 * np.pi)) - t / 2 - np.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)


def z_rs(t):
    """Riemann-Siegel approximation of Z(t) for t >= 200 (error well below zero spacing)."""
    t = np.asarray(t, dtype=float)
    a = np.sqrt(t / (2 * np.pi))
    n_max = np.floor(a).astype(int)
    nn = np.arange(1, int(n_max.max()) + 1)
    th = theta(t)
    terms = np.cos(th[:, None] - t[:, None] * np.log(nn)[None, :]) / np.sqrt(nn)[None, :]
    terms[nn[None, :] > n_max[:, None]] = 0.0
    main = 2 * terms.sum(axis=1)
    p = a - n_max
    c0 = np.cos(2 * np.pi * (p * p - p - 1 / 16)) / np.cos(2 * np.pi * p)
    sign = np.where(n_max % 2 == 1, 1.0, -1.0)
    return main + sign * a**-0.5 * c0


def refine(a, b):
    """Illinois regula falsi on mpmath.siegelz inside the bracket [a, b]."""
    fa, fb = float(mpmath.siegelz(a)), float(mpmath.siegelz(b))
    side = 0
    for _ in range(100):
        m = (a * fb - b * fa) / (fb - fa)
        if b - a < 1e-11:
            break
        fm = float(mpmath.siegelz(m))
        if fm == 0.0:
            return m
        if (fm > 0) == (fb > 0):
            b, fb = m, fm
            if side == -1:
                fa /= 2
            side = -1
        else:
            a, fa = m, fm
            if side == 1:
                fb /= 2
            side = 1
        if abs(fm) < 1e-13:
            break
    return (a * fb - b * fa) / (fb - fa)


def brackets(count, step):
    out = []
    grid = np.arange(10.0, SMALL_T, step)
    vals = np.array([float(mpmath.siegelz(g)) for g in grid])
    idx = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    out.extend((grid[i], grid[i + 1]) for i in idx)
    lo = grid[-1]
    while len(out) < count:
        g = lo + step * np.arange(0, 20001)
        v = z_rs(g)
        idx = np.nonzero(np.sign(v[:-1]) != np.sign(v[1:]))[0]
        out.extend((g[i], g[i + 1]) for i in idx)
        lo = g[-1]
    return out[:count]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10000)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--output", default="data/zeros.txt")
    args = ap.parse_args(argv)
    mpmath.mp.dps = 20
    br = brackets(args.count, args.step)
    with open(args.output, "w") as fh:
        for k, (a, b) in enumerate(br, 1):
            fh.write(f"{refine(a, b):.12f}\n")
            if k % 500 == 0:
                print(k, file=sys.stderr, flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
