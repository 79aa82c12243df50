"""Experiment runner: one subcommand per experiment, CSV/JSONL reports.

Reports are deterministic: rows are computed (possibly in a process pool)
and written in input order, floats are written with ``repr``, and nothing
time-dependent is emitted unless ``--timestamp``/``--timing`` is given.  The
``# sha256=`` line hashes the report body (header and rows).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import contour, hildebrand, saddle, sieve, zeros as zeros_mod
from .errors import ConfigError, DomainError, ShortSmoothError
from .zeta_smooth import implied_decay_constant, ratio_decay_profile

SCHEMA_VERSION = 1
THETA_MIN = 17 / 30
EPS_MAX = 0.2
DEFAULT_T_GRID = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0)

EXPERIMENTS = ("count", "saddle", "theorem-main", "perron", "ftheta", "hildebrand",
               "boundary-example", "explicit-psi", "decay-profile", "export-contour")

COLUMNS = {
    "count": ["x", "y", "h", "exact", "provenance"],
    "saddle": ["x", "y", "u", "alpha", "residual", "iterations", "log_rankin", "exact",
               "ht_ratio", "alpha_approx", "approx_gap", "provenance"],
    "perron": ["x", "y", "h", "H", "exact", "estimate", "rel_err", "abs_err", "error_bound",
               "provenance"],
    "ftheta": ["x", "y", "h", "eps", "exact", "f_theta", "estimate", "rel_err", "imag_residue",
               "provenance"],
    "hildebrand": ["x", "y", "h", "exact", "g", "estimate", "rel_err", "terms", "provenance"],
    "boundary-example": ["x", "y", "h", "exact", "integers", "primes_above_y", "doubled_primes",
                         "density", "predicted_density", "provenance"],
    "explicit-psi": ["x", "h", "T", "zeros_used", "exact", "estimate", "abs_err", "rel_err",
                     "provenance"],
    "decay-profile": ["x", "y", "u", "alpha", "t", "ratio", "implied_c0"],
    "theorem-main": ["x", "y", "h", "u", "exact_short", "exact_long", "short_density",
                     "long_density", "ratio", "bound", "implied_constant", "provenance"],
    "export-contour": ["index", "kind", "source", "t_lo", "t_hi", "sigma_lo", "sigma_hi"],
}

# experiment -> fields that must be set (grid rows supply x, y, h)
REQUIRED = {
    "count": ("x", "y"),
    "saddle": ("x", "y"),
    "perron": ("x", "y", "h", "H"),
    "ftheta": ("x", "y", "h"),
    "hildebrand": ("x", "y", "h"),
    "boundary-example": ("x",),
    "explicit-psi": ("x", "zeros"),
    "decay-profile": ("x", "y"),
    "theorem-main": ("x", "y"),
    "export-contour": ("x", "y", "H"),
}


@dataclass
class ExperimentConfig:
    experiment: str
    x: float | None = None
    y: int | None = None
    h: float | None = None
    eps: float = 0.05
    H: float | None = None
    T: float | None = None
    theta: float | None = None
    grid: list[tuple[float, int | None, float | None]] | None = None
    zeros: str | None = None
    max_zeros: int | None = None
    cache: str | None = None
    output: str | None = None
    format: str = "csv"
    workers: int = 1
    seed: int = 0
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    export_path: str | None = None
    samples: int = 2001
    synthetic_zeros: int = 0
    timestamp: bool = False
    timing: bool = False

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: unknown experiment {self.experiment!r}")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError(f"format: must be csv or jsonl, got {self.format!r}")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if self.theta is not None and not THETA_MIN < self.theta <= 1:
            raise ConfigError(f"theta: must lie in (17/30, 1], got {self.theta}")
        if self.experiment in ("ftheta", "export-contour", "perron") and not 0 < self.eps <= EPS_MAX:
            raise ConfigError(f"eps: must lie in (0, {EPS_MAX}] for contour experiments, got {self.eps}")
        if self.experiment == "export-contour" and not self.export_path:
            raise ConfigError("export_path: required for export-contour")
        if self.samples < 2:
            raise ConfigError("samples: must be >= 2")
        have = {"x": self.x is not None or self.grid is not None,
                "y": self.y is not None or (self.grid is not None and all(r[1] is not None for r in self.grid)),
                "h": self.h is not None or self.theta is not None
                or (self.grid is not None and all(r[2] is not None for r in self.grid)),
                "H": self.H is not None, "zeros": self.zeros is not None}
        for name in REQUIRED[self.experiment]:
            if not have[name]:
                raise ConfigError(f"{name}: required for experiment {self.experiment}")
        if self.experiment == "theorem-main" and not have["h"]:
            raise ConfigError("h: theorem-main needs h, theta or a grid with h")

    def rows(self) -> list[tuple[float, int | None, float | None]]:
        if self.grid is not None:
            return list(self.grid)
        return [(self.x, self.y, self.h)]


@dataclass
class EstimateReport:
    experiment: str
    columns: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)

    def _cells(self, row: dict) -> list[str]:
        return [_fmt(row.get(c)) for c in self.columns]

    def body_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow(self._cells(r))
        return buf.getvalue()

    def body_jsonl(self) -> str:
        lines = [json.dumps({c: _jsonable(r.get(c)) for c in self.columns}, sort_keys=False)
                 for r in self.rows]
        return "".join(line + "\n" for line in lines)

    def render(self, fmt: str = "csv", timestamp: str | None = None) -> str:
        body = self.body_csv() if fmt == "csv" else self.body_jsonl()
        digest = hashlib.sha256(body.encode()).hexdigest()
        if fmt == "csv":
            head = f"# shortsmooth report schema={SCHEMA_VERSION} experiment={self.experiment}\n"
            head += f"# sha256={digest}\n"
            if timestamp:
                head += f"# timestamp={timestamp}\n"
            return head + body
        meta = {"schema": SCHEMA_VERSION, "experiment": self.experiment, "sha256": digest,
                "columns": self.columns}
        if timestamp:
            meta["timestamp"] = timestamp
        return json.dumps(meta) + "\n" + body

    def column(self, name: str) -> list:
        return [r.get(name) for r in self.rows]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def rel_err(est: float | None, exact: float | None) -> float | None:
    if est is None or exact is None or exact == 0:
        return None
    return (est - exact) / exact


# --- row workers -------------------------------------------------------------

class _Counts:
    """Exact counts with a read-only snapshot of the cache; new values are collected."""

    def __init__(self, known: dict, workers: int):
        self.known = known
        self.new: dict = {}
        self.workers = workers

    def psi(self, x: int, y: int) -> int:
        key = (x, y, 0)
        if key in self.known:
            return self.known[key]
        v = sieve.psi_exact(x, y, workers=self.workers)
        self.new[key] = v
        return v

    def interval(self, x: int, h: int, y: int) -> int:
        key = (x, y, h)
        if h == 0:
            return 0
        if key in self.known:
            return self.known[key]
        v = sieve.psi_interval_exact(x, h, y, workers=self.workers)
        self.new[key] = v
        return v


def _h_for(cfg: ExperimentConfig, x: float, h: float | None) -> int | None:
    if h is not None:
        return int(h)
    if cfg.theta is not None:
        return math.ceil(x**cfg.theta)
    return None


def _row_count(cfg, x, y, h, counts):
    x, y = int(x), int(y)
    if h:
        return [dict(x=x, y=y, h=int(h), exact=counts.interval(x, int(h), y), provenance="divide")]
    return [dict(x=x, y=y, h=0, exact=counts.psi(x, y), provenance=sieve.psi_strategy(x))]


def _row_saddle(cfg, x, y, h, counts):
    y = int(y)
    r = saddle.saddle_point(x, y)
    u = saddle.u_param(x, y)
    row = dict(x=int(x), y=y, u=u, alpha=r.alpha, residual=r.residual, iterations=r.iterations,
               log_rankin=r.log_rankin)
    if x <= sieve.DEFAULT_BUDGET.max_x:
        psi = counts.psi(int(x), y)
        row.update(exact=psi, ht_ratio=saddle.ht_ratio(x, y, psi, r.alpha),
                   provenance=sieve.psi_strategy(int(x)))
    if math.log(x) < y <= x:
        a = saddle.alpha_approx(x, y)
        row.update(alpha_approx=a, approx_gap=(1 - r.alpha) * math.log(y) - math.log(u * math.log(u + 1)))
    return [row]


def _row_perron(cfg, x, y, h, counts):
    x, y, h = int(x), int(y), int(h)
    exact = counts.interval(x, h, y)
    est = contour.perron_count(x, h, y, cfg.H)
    return [dict(x=x, y=y, h=h, H=cfg.H, exact=exact, estimate=est, rel_err=rel_err(est, exact),
                 abs_err=abs(est - exact), error_bound=20 * x * math.log(x) / cfg.H,
                 provenance="divide")]


def _row_ftheta(cfg, x, y, h, counts):
    x, y, h = int(x), int(y), int(h)
    res = contour.f_theta_detail(x, y, cfg.eps)
    exact = counts.interval(x, h, y)
    est = res.value * h
    return [dict(x=x, y=y, h=h, eps=cfg.eps, exact=exact, f_theta=res.value, estimate=est,
                 rel_err=rel_err(est, exact), imag_residue=res.imag_residue, provenance="divide")]


def _row_hildebrand(cfg, x, y, h, counts):
    x, y, h = int(x), int(y), int(h)
    g = hildebrand.g_estimate(x, y)
    exact = counts.interval(x, h, y)
    est = h * g.value
    return [dict(x=x, y=y, h=h, exact=exact, g=g.value, estimate=est, rel_err=rel_err(est, exact),
                 terms=g.terms_enumerated, provenance="divide")]


def _row_boundary(cfg, x, y, h, counts):
    b = hildebrand.boundary_example(int(x), workers=counts.workers)
    out = []
    for case, pred in ((b.long, b.predicted_short_density - b.predicted_gap),
                       (b.short, b.predicted_short_density)):
        out.append(dict(x=b.x, y=b.y, h=case.h, exact=case.exact, integers=case.integers,
                        primes_above_y=case.primes_above_y, doubled_primes=case.doubled_primes,
                        density=case.density, predicted_density=pred, provenance="divide"))
    return out


def _row_explicit(cfg, x, y, h, counts):
    zl = _load_zeros(cfg)
    T = cfg.T if cfg.T is not None else zl.max_ordinate
    used = int(zl.up_to(T).size)
    if h:
        est = zeros_mod.prime_interval_explicit(x, h, T, zl)
        exact = sieve.prime_count_interval(x, h)
        prov = "eratosthenes"
    else:
        est = zeros_mod.chebyshev_psi_explicit(x, T, zl)
        exact = sieve.lambda_exact_sum(x)
        prov = "lambda-sieve"
    return [dict(x=x, h=h or 0, T=T, zeros_used=used, exact=exact, estimate=est,
                 abs_err=abs(est - exact), rel_err=rel_err(est, exact), provenance=prov)]


def _row_decay(cfg, x, y, h, counts):
    y = int(y)
    alpha = saddle.saddle_point(x, y).alpha
    u = saddle.u_param(x, y)
    ratios = ratio_decay_profile(x, y, cfg.t_grid, alpha)
    out = []
    for t, r in zip(cfg.t_grid, ratios):
        c0 = implied_decay_constant(r, t, alpha, u) if t != 0 and r < 1 else None
        out.append(dict(x=x, y=y, u=u, alpha=alpha, t=float(t), ratio=float(r), implied_c0=c0))
    return out


def _row_theorem(cfg, x, y, h, counts):
    x, y = int(x), int(y)
    h = _h_for(cfg, x, h)
    short = counts.interval(x, h, y)
    long = counts.psi(x, y)
    u = math.log(x) / math.log(y)
    sd, ld = short / h, long / x
    ratio = sd / ld
    bound = math.log(u + 1) / math.log(y)
    return [dict(x=x, y=y, h=h, u=u, exact_short=short, exact_long=long, short_density=sd,
                 long_density=ld, ratio=ratio, bound=bound, implied_constant=abs(ratio - 1) / bound,
                 provenance=f"interval=divide;long={sieve.psi_strategy(x)}")]


def _row_export(cfg, x, y, h, counts):
    pairs = []
    if cfg.zeros:
        pairs += [(float(g), 0.5) for g in _load_zeros(cfg).ordinates if g <= cfg.H + 10 * math.sqrt(y)]
    pairs += contour.synthetic_zero_set(cfg.synthetic_zeros, cfg.H, x, cfg.seed)
    pairs.sort()
    path = contour.build_gamma(pairs, x, int(y), cfg.eps, cfg.H)
    path.export_csv(cfg.export_path, cfg.samples)
    out = []
    for i, seg in enumerate(path.segments):
        s0, s1 = seg.sigma_at(seg.t_lo), seg.sigma_at(seg.t_hi)
        out.append(dict(index=i, kind=seg.kind, source=seg.source, t_lo=seg.t_lo, t_hi=seg.t_hi,
                        sigma_lo=min(s0, s1), sigma_hi=max(s0, s1)))
    return out


ROW_FUNCS: dict[str, Callable] = {
    "count": _row_count, "saddle": _row_saddle, "perron": _row_perron, "ftheta": _row_ftheta,
    "hildebrand": _row_hildebrand, "boundary-example": _row_boundary,
    "explicit-psi": _row_explicit, "decay-profile": _row_decay, "theorem-main": _row_theorem,
    "export-contour": _row_export,
}

_ZERO_CACHE: dict = {}


def _load_zeros(cfg: ExperimentConfig) -> zeros_mod.ZeroList:
    key = (cfg.zeros, cfg.max_zeros)
    if key not in _ZERO_CACHE:
        _ZERO_CACHE[key] = zeros_mod.load_zeros(cfg.zeros, cfg.max_zeros)
    return _ZERO_CACHE[key]


def _task(cfg: ExperimentConfig, index: int, triple, known: dict, inner_workers: int):
    x, y, h = triple
    counts = _Counts(known, inner_workers)
    t0 = time.perf_counter()
    try:
        rows = ROW_FUNCS[cfg.experiment](cfg, x, y, h, counts)
    except ShortSmoothError as e:
        raise type(e)(f"row {index}: {e}") from e
    except (ValueError, ArithmeticError) as e:
        raise DomainError(f"row {index}: {e}") from e
    if cfg.timing:
        dt = time.perf_counter() - t0
        for r in rows:
            r["seconds"] = dt
    return rows, counts.new


def run(cfg: ExperimentConfig) -> EstimateReport:
    """Execute the configured experiment over its grid and write the report if requested."""
    cfg.validate()
    cache = sieve.CountCache(cfg.cache) if cfg.cache else None
    known = cache.snapshot() if cache is not None else {}
    triples = cfg.rows()
    if cfg.workers > 1 and len(triples) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            futs = [ex.submit(_task, cfg, i, t, known, 1) for i, t in enumerate(triples)]
            results = [f.result() for f in futs]
    else:
        results = [_task(cfg, i, t, known, cfg.workers) for i, t in enumerate(triples)]
    rows = [r for rs, _ in results for r in rs]
    if cache is not None:
        for _, new in results:
            for (x, y, h), v in sorted(new.items()):
                if cache.get(x, y, h) is None:
                    cache.put(x, y, h, v)
    columns = list(COLUMNS[cfg.experiment]) + (["seconds"] if cfg.timing else [])
    report = EstimateReport(cfg.experiment, columns, rows)
    if cfg.output:
        stamp = time.strftime("%Y-%m-%dT%H:%M:%S") if cfg.timestamp else None
        with open(cfg.output, "w", newline="") as fh:
            fh.write(report.render(cfg.format, stamp))
    return report


def verify_theorem_main(grid: Sequence[tuple[int, int, int]], workers: int = 1,
                        cache: str | None = None) -> EstimateReport:
    """Short versus long smooth densities on a grid of (x, y, h)."""
    cfg = ExperimentConfig("theorem-main", grid=[(int(x), int(y), int(h)) for x, y, h in grid],
                           workers=workers, cache=cache)
    return run(cfg)


# --- config / argument parsing ----------------------------------------------

def _num(s: str) -> float:
    """Parse '1e6', '10**6' or '1000000'; integral values come back as int."""
    s = s.strip()
    if "**" in s:
        a, b = s.split("**", 1)
        v = _num(a) ** _num(b)
    else:
        try:
            v = int(s)
        except ValueError:
            v = float(s)
    if isinstance(v, float) and v.is_integer() and abs(v) < 2**63:
        return int(v)
    return v


def read_grid(path: str) -> list[tuple]:
    """Grid file: one 'x,y,h' per line (y, h may be empty); '#' comments and an x,y,h header allowed."""
    out = []
    try:
        fh = open(path)
    except OSError as e:
        raise ConfigError(f"grid: cannot read {path}: {e}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line or line.replace(" ", "") == "x,y,h":
                continue
            parts = [p.strip() for p in line.split(",")]
            parts += [""] * (3 - len(parts))
            try:
                x, y, h = (_num(p) if p else None for p in parts[:3])
            except ValueError:
                raise ConfigError(f"grid: {path}:{lineno}: cannot parse {line!r}") from None
            out.append((x, int(y) if y is not None else None, h))
    if not out:
        raise ConfigError(f"grid: {path} has no rows")
    return out


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _coerce(name: str, value: str):
    if name in ("x", "h", "H", "T", "eps", "theta"):
        return _num(value)
    if name in ("y", "max_zeros", "workers", "seed", "samples", "synthetic_zeros"):
        return int(_num(value))
    if name == "t_grid":
        return tuple(float(v) for v in value.split(",") if v.strip())
    if name in ("timestamp", "timing"):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return value


def read_config_file(path: str) -> dict:
    """Flat key=value file; keys may use dashes or underscores."""
    out = {}
    try:
        fh = open(path)
    except OSError as e:
        raise ConfigError(f"config: cannot read {path}: {e}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config: {path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            k = k.replace("-", "_")
            if k not in _FIELD_TYPES or k == "experiment":
                raise ConfigError(f"{k}: unknown config key ({path}:{lineno})")
            try:
                out[k] = _coerce(k, v)
            except ValueError as e:
                raise ConfigError(f"{k}: bad value {v!r} ({path}:{lineno}): {e}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortsmooth",
                                     description="Smooth numbers in short intervals: experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--print-config", action="store_true", help="print resolved config and exit")
        for flag in ("x", "h", "H", "T", "eps", "theta"):
            p.add_argument(f"--{flag}", dest=flag, type=_num)
        for flag in ("y", "max-zeros", "workers", "seed", "samples", "synthetic-zeros"):
            p.add_argument(f"--{flag}", dest=flag.replace("-", "_"), type=lambda s: int(_num(s)))
        p.add_argument("--grid", help="file of x,y,h rows")
        p.add_argument("--zeros", help="zeros file, one ordinate per line")
        p.add_argument("--cache", help="append-only CSV count cache")
        p.add_argument("--output", help="report path (default: stdout)")
        p.add_argument("--format", choices=("csv", "jsonl"))
        p.add_argument("--t-grid", dest="t_grid", type=lambda s: _coerce("t_grid", s))
        p.add_argument("--export-path", dest="export_path")
        p.add_argument("--timestamp", action="store_true", default=None)
        p.add_argument("--timing", action="store_true", default=None)
    return parser


def config_from_args(argv: Sequence[str] | None = None) -> tuple[ExperimentConfig, bool]:
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    for k, v in vars(args).items():
        if k in ("config", "print_config", "experiment") or v is None:
            continue
        values[k] = v
    if "grid" in values and isinstance(values["grid"], str):
        values["grid"] = read_grid(values["grid"])
    return ExperimentConfig(experiment=args.experiment, **values), args.print_config


def format_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "grid" and v is not None:
            v = ";".join(",".join("" if a is None else str(a) for a in row) for row in v)
        elif f.name == "t_grid":
            v = ",".join(repr(float(t)) for t in v)
        lines.append(f"{f.name}={'' if v is None else v}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg, show = config_from_args(argv)
        if show:
            sys.stdout.write(format_config(cfg))
            return 0
        report = run(cfg)
        if not cfg.output:
            sys.stdout.write(report.render(cfg.format))
        return 0
    except ShortSmoothError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
