"""Short versus long smooth densities on the desk-scale theorem grid.

Prints one row per (x, y) with the ratio, alpha and the implied constant,
then a per-y verdict on whether the constant went down from the smallest to
the largest x.

    python scripts/theorem_grid.py --xs 1e7,1e8,1e9 --ys 1e2,1e3,1e4 --theta 0.7
"""
import argparse
import math
import time

from shortsmooth.cli import _num, verify_theorem_main
from shortsmooth.saddle import saddle_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--xs", default="1e7,1e8,1e9")
    ap.add_argument("--ys", default="1e2,1e3,1e4")
    ap.add_argument("--theta", type=float, default=0.7)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--cache", help="count cache shared with the CLI")
    args = ap.parse_args()
    xs = [int(_num(v)) for v in args.xs.split(",")]
    ys = [int(_num(v)) for v in args.ys.split(",")]
    grid = [(x, y, math.ceil(x**args.theta)) for x in xs for y in ys]

    t0 = time.perf_counter()
    rows = verify_theorem_main(grid, workers=args.workers, cache=args.cache).rows
    print(f"{'x':>12} {'y':>7} {'h':>9} {'ratio':>9} {'alpha':>9} {'ratio/alpha':>11} {'C':>8}")
    consts = {}
    for r in rows:
        a = saddle_point(r["x"], r["y"]).alpha
        consts[(r["x"], r["y"])] = r["implied_constant"]
        print(f"{r['x']:>12} {r['y']:>7} {r['h']:>9} {r['ratio']:9.5f} {a:9.5f} "
              f"{r['ratio'] / a:11.5f} {r['implied_constant']:8.4f}")
    for y in ys:
        lo, hi = consts[(xs[0], y)], consts[(xs[-1], y)]
        print(f"y={y}: C({xs[0]:.0e})={lo:.4f} C({xs[-1]:.0e})={hi:.4f} "
              f"{'nonincreasing' if hi <= lo else 'increased'}")
    print(f"elapsed {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
