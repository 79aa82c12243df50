"""Integration contours for the smooth-number Perron integral.

Every path here is the graph of a function t -> sigma(t) travelled upward in
t.  Pieces are vertical lines (constant sigma) or exponential arcs

    t = gamma + sign * A * y**delta,   sigma = 1 - slope * delta,

i.e. sigma(t) = 1 - slope * log(|t - gamma| / A) / log y.  Saddle arcs use
slope 1; arcs around a zero use slope 1 - eps.

Integrals are computed with composite Gauss-Legendre rules in t, using
ds = (sigma'(t) + i) dt.  All integrands satisfy f(conj s) = conj f(s), so by
default only t >= 0 is integrated.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import BudgetError, ConfigError, DomainError
from .saddle import saddle_point
from .zeta_smooth import log_zeta_smooth_many, prime_logs

DEFAULT_C1 = 0.05
TAYLOR_CUTOFF = 1e-4


@dataclass(frozen=True)
class QuadConfig:
    panel_max_width_t: float | None = None  # None: 0.5 / log x
    nodes_per_panel: int = 16
    tail_cut: float = 0.0  # unused unless > 0: drop panels whose weight falls below this
    symmetric: bool = True
    block: int = 256  # phase restart interval for vertical lines
    max_panels: int = 50_000_000

    def __post_init__(self):
        if self.nodes_per_panel < 8:
            raise ConfigError("nodes_per_panel must be >= 8")
        if self.panel_max_width_t is not None and not self.panel_max_width_t > 0:
            raise ConfigError("panel_max_width_t must be > 0")

    def width(self, x: float) -> float:
        limit = 0.5 / math.log(x)
        if self.panel_max_width_t is None:
            return limit
        if self.panel_max_width_t > limit * (1 + 1e-12):
            raise ConfigError(f"panel_max_width_t must be <= 0.5/log x = {limit:.6g}")
        return self.panel_max_width_t

    def refined(self, factor: int = 2, x: float | None = None) -> "QuadConfig":
        base = self.panel_max_width_t if self.panel_max_width_t is not None else 0.5 / math.log(x)
        return replace(self, panel_max_width_t=base / factor)


@lru_cache(maxsize=8)
def _gauss(m: int):
    return np.polynomial.legendre.leggauss(m)


@dataclass(frozen=True)
class PathSegment:
    kind: str  # "vertical" or "exp_arc"
    t_lo: float
    t_hi: float
    sigma: float = math.nan  # vertical only
    slope: float = 1.0
    gamma: float = 0.0
    amp: float = 1.0
    sign: int = 1
    log_y: float = 1.0
    eps: float = 0.0
    source: str = ""

    def __post_init__(self):
        if not self.t_lo < self.t_hi:
            raise DomainError(f"segment needs t_lo < t_hi, got [{self.t_lo}, {self.t_hi}]")

    def delta_at(self, t: float) -> float:
        return math.log(abs(t - self.gamma) / self.amp) / self.log_y

    @property
    def delta_lo(self) -> float:
        a, b = self.delta_at(self.t_lo), self.delta_at(self.t_hi)
        return min(a, b)

    @property
    def delta_hi(self) -> float:
        a, b = self.delta_at(self.t_lo), self.delta_at(self.t_hi)
        return max(a, b)

    def at_delta(self, delta: float) -> complex:
        return complex(1 - self.slope * delta,
                       self.gamma + self.sign * self.amp * math.exp(delta * self.log_y))

    def sigma_at(self, t: float) -> float:
        if self.kind == "vertical":
            return self.sigma
        return 1 - self.slope * math.log(abs(t - self.gamma) / self.amp) / self.log_y

    def sigma_array(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "vertical":
            return np.full_like(t, self.sigma)
        return 1 - self.slope * np.log(np.abs(t - self.gamma) / self.amp) / self.log_y

    def dsigma_array(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "vertical":
            return np.zeros_like(t)
        return -self.slope / ((t - self.gamma) * self.log_y)

    def covers(self, t: float) -> bool:
        return self.t_lo <= t <= self.t_hi

    def clipped(self, lo: float, hi: float) -> "PathSegment":
        return replace(self, t_lo=max(lo, self.t_lo), t_hi=min(hi, self.t_hi))


def vertical(sigma: float, t_lo: float, t_hi: float, source: str = "") -> PathSegment:
    return PathSegment("vertical", t_lo, t_hi, sigma=sigma, source=source)


def exp_arc(slope: float, gamma: float, amp: float, sign: int, y: int,
            delta_lo: float, delta_hi: float, eps: float, source: str = "") -> PathSegment:
    log_y = math.log(y)
    ta = gamma + sign * amp * math.exp(delta_lo * log_y)
    tb = gamma + sign * amp * math.exp(delta_hi * log_y)
    return PathSegment("exp_arc", min(ta, tb), max(ta, tb), slope=slope, gamma=gamma,
                       amp=amp, sign=sign, log_y=log_y, eps=eps, source=source)


@dataclass(frozen=True)
class ContourPath:
    segments: tuple[PathSegment, ...]
    eps: float
    H: float
    alpha: float | None = None
    lambda_floor: float | None = None

    @property
    def t_lo(self) -> float:
        return self.segments[0].t_lo

    @property
    def t_hi(self) -> float:
        return self.segments[-1].t_hi

    def segment_at(self, t: float) -> PathSegment:
        his = [seg.t_hi for seg in self.segments]
        i = int(np.searchsorted(his, t, side="left"))
        if i == len(self.segments) or not self.segments[i].covers(t):
            raise DomainError(f"t = {t} outside path [{self.t_lo}, {self.t_hi}]")
        return self.segments[i]

    def sigma_at(self, t: float) -> float:
        return self.segment_at(t).sigma_at(t)

    def junction_gaps(self) -> list[float]:
        """|end(k) - start(k+1)| for consecutive segments."""
        gaps = []
        for a, b in zip(self.segments, self.segments[1:]):
            pa = complex(a.sigma_at(a.t_hi), a.t_hi)
            pb = complex(b.sigma_at(b.t_lo), b.t_lo)
            gaps.append(abs(pa - pb))
        return gaps

    def sigma_range(self) -> tuple[float, float]:
        vals = [seg.sigma_at(t) for seg in self.segments for t in (seg.t_lo, seg.t_hi)]
        return min(vals), max(vals)

    def sample(self, n: int) -> np.ndarray:
        """(n, 2) array of (t, sigma) on a uniform t grid."""
        if n < 2:
            raise DomainError("need at least 2 samples")
        ts = np.linspace(self.t_lo, self.t_hi, n)
        return np.column_stack([ts, [self.sigma_at(float(t)) for t in ts]])

    def export_csv(self, path, samples: int) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "sigma"])
            for t, s in self.sample(samples):
                w.writerow([repr(float(t)), repr(float(s))])


def lambda_floor(x: float, c1: float = DEFAULT_C1) -> float:
    """Zero-free region width c1 / ((log x)^(2/3) (log log x)^(1/3)); reporting only."""
    lx = math.log(x)
    return c1 / (lx ** (2 / 3) * math.log(lx) ** (1 / 3))


def _check_eps(eps: float) -> None:
    if not 0 < eps < 0.25:
        raise DomainError(f"eps must lie in (0, 1/4), got {eps}")


def gamma0_height(x: float, y: int, eps: float) -> float:
    u = math.log(x) / math.log(y)
    return math.log(u + 1) / (eps * eps * math.log(y))


def gamma0_pieces(x: float, y: int, eps: float, alpha: float | None = None) -> list[PathSegment]:
    _check_eps(eps)
    if alpha is None:
        alpha = saddle_point(x, y).alpha
    d_lo, d_hi = 1 - alpha, (1 - eps) / 2
    if not d_lo < d_hi:
        raise DomainError(f"degenerate saddle contour: 1 - alpha = {d_lo:.6g} >= (1 - eps)/2")
    T0 = gamma0_height(x, y, eps)
    amp = T0 / math.exp((1 - alpha) * math.log(y))
    return [
        exp_arc(1.0, 0.0, amp, -1, y, d_lo, d_hi, eps, "gamma0"),
        vertical(alpha, -T0, T0, "gamma0"),
        exp_arc(1.0, 0.0, amp, 1, y, d_lo, d_hi, eps, "gamma0"),
    ]


def gamma0_path(x: float, y: int, eps: float, alpha: float | None = None) -> ContourPath:
    """Saddle vertical |t| <= T0 at sigma = alpha, with arcs out to sigma = (1+eps)/2."""
    if alpha is None:
        alpha = saddle_point(x, y).alpha
    segs = gamma0_pieces(x, y, eps, alpha)
    return ContourPath(tuple(segs), eps, segs[-1].t_hi, alpha=alpha)


def gamma_rho_pieces(gamma_ord: float, nu: float, y: int, eps: float) -> list[PathSegment]:
    if not 0 < nu <= 0.5:
        raise DomainError(f"nu must lie in (0, 1/2], got {nu}")
    _check_eps(eps)
    reach = 10 * math.exp(nu * math.log(y))
    segs = [vertical(1 - (1 - eps) * nu, gamma_ord - reach, gamma_ord + reach, "rho")]
    if nu < 0.5:
        segs.insert(0, exp_arc(1 - eps, gamma_ord, 10.0, -1, y, nu, 0.5, eps, "rho"))
        segs.append(exp_arc(1 - eps, gamma_ord, 10.0, 1, y, nu, 0.5, eps, "rho"))
    return segs


def gamma_rho_path(gamma_ord: float, nu: float, y: int, eps: float) -> ContourPath:
    """Detour around the zero 1 - nu + i*gamma_ord; arcs vanish when nu = 1/2."""
    segs = gamma_rho_pieces(gamma_ord, nu, y, eps)
    return ContourPath(tuple(segs), eps, max(abs(segs[0].t_lo), abs(segs[-1].t_hi)))


# --- merging -----------------------------------------------------------------

def _zero_pairs(zeros) -> list[tuple[float, float]]:
    if zeros is None:
        return []
    if hasattr(zeros, "ordinates"):
        return [(float(g), 0.5) for g in zeros.ordinates]
    return [(float(g), float(nu)) for g, nu in zeros]


def candidate_curves(zeros, x: float, y: int, eps: float, H: float,
                     alpha: float | None = None) -> list[PathSegment]:
    """All raw curves (saddle pieces, mirrored zero detours, default line) on [-H, H]."""
    curves = [vertical((1 + eps) / 2, -H, H, "default")]
    for seg in gamma0_pieces(x, y, eps, alpha):
        if seg.t_hi > -H and seg.t_lo < H:
            curves.append(seg.clipped(-H, H))
    for g, nu in _zero_pairs(zeros):
        if nu == 0.5:
            continue  # lies on the default line
        for gg in (g, -g):
            for seg in gamma_rho_pieces(gg, nu, y, eps):
                if seg.t_hi > -H and seg.t_lo < H:
                    curves.append(seg.clipped(-H, H))
    return curves


def direct_sigma(curves: Sequence[PathSegment], t: float) -> float:
    """Pointwise maximum over the raw curves (oracle for the merged path)."""
    return max(c.sigma_at(t) for c in curves if c.covers(t))


def _crossings(a: PathSegment, b: PathSegment) -> list[float]:
    lo, hi = max(a.t_lo, b.t_lo), min(a.t_hi, b.t_hi)
    if not lo < hi:
        return []
    if a.kind == "vertical" and b.kind == "vertical":
        return []
    if a.kind == "vertical" or b.kind == "vertical":
        v, c = (a, b) if a.kind == "vertical" else (b, a)
        t = c.gamma + c.sign * c.amp * math.exp((1 - v.sigma) * c.log_y / c.slope)
        return [t] if lo < t < hi else []
    ka, kb = a.slope / a.log_y, b.slope / b.log_y
    cuts = [lo, hi]
    if ka != kb:
        tc = (ka * b.gamma - kb * a.gamma) / (ka - kb)
        if lo < tc < hi:
            cuts.insert(1, tc)
    out = []
    f = lambda t: a.sigma_at(t) - b.sigma_at(t)
    for p, q in zip(cuts, cuts[1:]):
        fp, fq = f(p), f(q)
        if fp == 0 or fq == 0 or (fp > 0) == (fq > 0):
            continue
        out.append(brentq(f, p, q, xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return out


def merge_max(curves: Sequence[PathSegment], t_lo: float, t_hi: float) -> list[PathSegment]:
    """Upper envelope sigma(t) = max over covering curves, as a minimal segment list."""
    bps = {t_lo, t_hi}
    for c in curves:
        bps.update(t for t in (c.t_lo, c.t_hi) if t_lo < t < t_hi)
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            bps.update(t for t in _crossings(curves[i], curves[j]) if t_lo < t < t_hi)
    pts = sorted(bps)
    pieces: list[list] = []
    for a, b in zip(pts, pts[1:]):
        if not a < b:
            continue
        m = 0.5 * (a + b)
        best, best_val = None, -math.inf
        for k, c in enumerate(curves):
            if c.covers(m):
                v = c.sigma_at(m)
                if v > best_val:
                    best, best_val = k, v
        if best is None:
            raise DomainError(f"no curve covers t = {m}")
        if pieces and pieces[-1][0] == best:
            pieces[-1][2] = b
        else:
            pieces.append([best, a, b])
    return [replace(curves[k], t_lo=a, t_hi=b) for k, a, b in pieces]


def synthetic_zero_set(k: int, H: float, x: float, seed: int) -> list[tuple[float, float]]:
    """k made-up zeros (gamma, nu): gamma uniform in (0, H), nu uniform in [lambda_floor(x), 1/2).

    These exercise the detour geometry only; they are not zeros of anything.
    """
    rng = np.random.default_rng(seed)
    gs = np.sort(rng.uniform(0, H, k))
    nus = rng.uniform(lambda_floor(x), 0.5, k)
    return [(float(g), float(n)) for g, n in zip(gs, nus)]


def build_gamma(zeros, x: float, y: int, eps: float, H: float,
                alpha: float | None = None, c1: float = DEFAULT_C1) -> ContourPath:
    """Merged contour on |t| <= H: the largest sigma among all curves, else (1+eps)/2."""
    if not 0 < H <= x:
        raise DomainError(f"need 0 < H <= x, got H={H}")
    if alpha is None:
        alpha = saddle_point(x, y).alpha
    pairs = _zero_pairs(zeros)
    gs = [g for g, _ in pairs]
    if gs != sorted(gs):
        raise DomainError("zeros must be sorted by ordinate")
    curves = candidate_curves(pairs, x, y, eps, H, alpha)
    segs = merge_max(curves, -H, H)
    return ContourPath(tuple(segs), eps, H, alpha=alpha, lambda_floor=lambda_floor(x, c1))


# --- quadrature --------------------------------------------------------------

@dataclass(frozen=True)
class IntegralResult:
    value: float
    imag_residue: float
    panels: int
    nodes: int = field(default=0)


def _panel_nodes(a: float, b: float, w: float, m: int):
    n = max(1, math.ceil((b - a) / w * (1 - 1e-12)))
    xg, wg = _gauss(m)
    width = (b - a) / n
    starts = a + width * np.arange(n)
    t = (starts[:, None] + (xg[None, :] + 1) * (width / 2)).ravel()
    wt = np.tile(wg * (width / 2), n)
    return t, wt, n


def _line_integral(segments: Iterable[PathSegment], y: int, logx: float, shift: float,
                   w: float, m: int, max_panels: int, chunk: int = 1 << 18):
    """sum over segments of int zeta(s,y) x^s e^{-shift} ds, and the panel count."""
    terms_re, terms_im, panels, nodes = [], [], 0, 0
    for seg in segments:
        t, wt, n = _panel_nodes(seg.t_lo, seg.t_hi, w, m)
        panels += n
        if panels > max_panels:
            raise BudgetError(f"quadrature needs more than {max_panels} panels")
        nodes += t.size
        for i in range(0, t.size, chunk):
            tt, ww = t[i:i + chunk], wt[i:i + chunk]
            s = seg.sigma_array(tt) + 1j * tt
            lz = log_zeta_smooth_many(s, y)
            f = np.exp(lz + s * logx - shift) * (seg.dsigma_array(tt) + 1j) * ww
            terms_re.append(f.real)
            terms_im.append(f.imag)
    re = math.fsum(np.concatenate(terms_re)) if terms_re else 0.0
    im = math.fsum(np.concatenate(terms_im)) if terms_im else 0.0
    return complex(re, im), panels, nodes


def _upper(segments: Iterable[PathSegment]) -> list[PathSegment]:
    return [seg.clipped(0.0, seg.t_hi) for seg in segments if seg.t_hi > 0]


def path_integral(path_segments: Sequence[PathSegment], x: float, y: int, q: QuadConfig,
                  divide_by_x: bool) -> IntegralResult:
    """(1/2 pi i) int zeta(s,y) x^s ds (optionally / x) along a t-symmetric path."""
    logx = math.log(x)
    shift = logx if divide_by_x else 0.0
    w = q.width(x)
    m = q.nodes_per_panel
    if q.symmetric:
        J, n, k = _line_integral(_upper(path_segments), y, logx, shift, w, m, q.max_panels)
        return IntegralResult(J.imag / math.pi, 0.0, 2 * n, 2 * k)
    J, n, k = _line_integral(path_segments, y, logx, shift, w, m, q.max_panels)
    val = J / (2j * math.pi)
    return IntegralResult(val.real, val.imag, n, k)


def f_theta_detail(x: float, y: int, eps: float, q: QuadConfig = QuadConfig(),
                   zeros=None, alpha: float | None = None) -> IntegralResult:
    if alpha is None:
        alpha = saddle_point(x, y).alpha
    pieces = gamma0_pieces(x, y, eps, alpha)
    if zeros is not None and any(nu < 0.5 for _, nu in _zero_pairs(zeros)):
        # keep only the saddle pieces that survive the merge
        reach = pieces[-1].t_hi
        merged = merge_max(candidate_curves(zeros, x, y, eps, reach, alpha), -reach, reach)
        pieces = [seg for seg in merged if seg.source == "gamma0"]
    return path_integral(pieces, x, y, q, divide_by_x=True)


def f_theta(x: float, y: int, eps: float, q: QuadConfig = QuadConfig(), zeros=None) -> float:
    """(1/2 pi i)(1/x) int zeta(s,y) x^s ds over the saddle part of the unbounded contour."""
    return f_theta_detail(x, y, eps, q, zeros).value


def near_axis_detail(x: float, y: int, q: QuadConfig = QuadConfig(),
                     alpha: float | None = None) -> IntegralResult:
    if alpha is None:
        alpha = saddle_point(x, y).alpha
    r = 1 / math.log(y)
    return path_integral([vertical(alpha, -r, r)], x, y, q, divide_by_x=False)


def near_axis_integral(x: float, y: int, q: QuadConfig = QuadConfig()) -> float:
    """(1/2 pi i) int_{alpha - i/log y}^{alpha + i/log y} zeta(s,y) x^s ds."""
    return near_axis_detail(x, y, q).value


def taylor_kernel(s, x: float, h: float) -> complex:
    """((x+h)^s - x^s)/s computed as x^s expm1(s log1p(h/x)) / s."""
    s = complex(s)
    if s == 0:
        raise DomainError("s must be nonzero")
    z = s * math.log1p(h / x)
    if abs(z) < TAYLOR_CUTOFF:
        z2 = z * z
        em1 = z + z2 / 2 + z2 * z / 6 + z2 * z2 / 24
    else:
        em1 = np.exp(z) - 1
    return complex(np.exp(s * math.log(x)) * em1 / s)


def perron_detail(x: float, h: float, y: int, H: float, q: QuadConfig = QuadConfig(),
                  alpha: float | None = None) -> IntegralResult:
    if not 2 <= H <= x:
        raise DomainError(f"need 2 <= H <= x, got H={H}")
    if h < 0:
        raise DomainError("h must be >= 0")
    if alpha is None:
        alpha = saddle_point(x, y).alpha
    logx = math.log(x)
    l1p = math.log1p(h / x)
    w = q.width(x)
    n = math.ceil(H / w * (1 - 1e-12))
    if n * (1 if q.symmetric else 2) > q.max_panels:
        raise BudgetError(f"quadrature needs {n} panels (max {q.max_panels})")
    width = H / n
    xg, wg = _gauss(q.nodes_per_panel)
    off = (xg + 1) * (width / 2)
    wts = wg * (width / 2)
    logp = np.ascontiguousarray(prime_logs(y))
    up = _kernels.perron_panels(logp, alpha, width, off, wts, n, logx, l1p, q.block)
    if q.symmetric:
        return IntegralResult(math.fsum(up.real) / math.pi, 0.0, 2 * n, 2 * n * len(off))
    down = _kernels.perron_panels(logp, alpha, -width, -off, wts, n, logx, l1p, q.block)
    re = math.fsum(np.concatenate([up.real, down.real]))
    # the lower walk yields int_0^H F(alpha - i tau) d tau = int_{-H}^0 F dt
    im = math.fsum(np.concatenate([up.imag, down.imag]))
    return IntegralResult(re / (2 * math.pi), im / (2 * math.pi), 2 * n, 2 * n * len(off))


def perron_count(x: float, h: float, y: int, H: float, q: QuadConfig = QuadConfig()) -> float:
    """(1/2 pi i) int_{alpha-iH}^{alpha+iH} zeta(s,y) ((x+h)^s - x^s)/s ds, real part."""
    return perron_detail(x, h, y, H, q).value
