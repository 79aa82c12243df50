"""Measure the constants frozen in the test fixtures.

perron   : |perron_count - exact| * H / (x log x), against the factor 20
ftheta   : relative error of f_theta * h against the sieve count
bt       : Brun-Titchmarsh constant over a grid of intervals
explicit : RMS of the truncated explicit formula under T-doublings

    python scripts/calibrate.py perron ftheta bt
    python scripts/calibrate.py explicit --zeros data/zeros.txt
"""
import argparse
import math
import time

from shortsmooth.contour import f_theta_detail, perron_count
from shortsmooth.hildebrand import brun_titchmarsh_ratio
from shortsmooth.sieve import lambda_exact_sum, psi_interval_exact
from shortsmooth.zeros import explicit_rms, load_zeros


def perron():
    for x, h, y, H in [(10**5, 10**3, 10**2, 10**4), (10**6, 10**4, 10**3, 10**5)]:
        t0 = time.perf_counter()
        est = perron_count(x, h, y, H)
        exact = psi_interval_exact(x, h, y)
        k = abs(est - exact) * H / (x * math.log(x))
        print(f"perron x={x} h={h} y={y} H={H}: est={est:.3f} exact={exact} "
              f"factor={k:.2e} ({time.perf_counter() - t0:.1f}s)")


def ftheta():
    for x, y, h in [(10**6, 10**3, 10**4), (10**6, 10**4, 10**4), (10**7, 10**3, 10**5)]:
        v = f_theta_detail(x, y, 0.05).value
        exact = psi_interval_exact(x, h, y)
        print(f"ftheta x={x} y={y} h={h}: est={v * h:.2f} exact={exact} rel={v * h / exact - 1:+.4f}")


def bt():
    worst = 0.0
    for x in (10**4, 10**5, 10**6, 10**7):
        for h in (10, 100, 1000, 10**4):
            worst = max(worst, brun_titchmarsh_ratio(x, h))
    print(f"brun-titchmarsh max ratio {worst:.4f}")


def explicit(path):
    zl = load_zeros(path)
    xs = [10**4 + 500 * k + 0.5 for k in range(20)]
    exact = [lambda_exact_sum(x) for x in xs]
    T = min(1200.0, zl.max_ordinate / 8)
    while T <= zl.max_ordinate:
        print(f"explicit T={T:.1f} zeros={zl.up_to(T).size} rms={explicit_rms(xs, T, zl, exact):.4f}")
        T *= 2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("what", nargs="+", choices=("perron", "ftheta", "bt", "explicit"))
    ap.add_argument("--zeros", default="data/zeros.txt")
    args = ap.parse_args()
    for w in args.what:
        if w == "explicit":
            explicit(args.zeros)
        else:
            globals()[w]()


if __name__ == "__main__":
    main()
