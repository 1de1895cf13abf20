"""Conformable fractional derivatives of functions on time scales.

At a right-scattered point the derivative of order alpha is the exact forward
quotient times t**(1-alpha). At a right-dense point it is the limit of the
same quotient taken inside the scale, computed from a geometric step sequence
with Richardson extrapolation. Orders above 1 split as alpha = n + beta and
reduce to the order-beta derivative of the n-th delta derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import (
    InternalDisagreement,
    LimitDiverged,
    NonPositivePoint,
    NotInKappa,
    NotInScale,
    NoWitnessFound,
    PoleAtPoint,
    ZeroNotInScale,
)
from .expr import Expr, derivative as d_dt, evaluate, substitute
from .timescale import TimeScale

__all__ = [
    "DerivConfig", "AlphaOrder", "t_alpha", "t_alpha_at_zero",
    "delta_derivative_n", "t_alpha_higher", "t_alpha_higher_paths",
    "power_rule", "sigma_shift", "chain_rule_witness", "naive_chain_gap",
]

_EPS = 2.220446049250313e-16
_NOISE_SAFETY = 8.0

HIGHER_ORDER_AGREEMENT_RTOL = 1e-9
WITNESS_GRID_POINTS = 10_000


@dataclass(frozen=True)
class DerivConfig:
    """Numerical policy for limit-based evaluation.

    dense_h0 is the initial quotient step, scaled by max(1, |t|); successive
    steps shrink by dense_ratio, at most dense_steps of them. The limit is
    accepted once two successive Richardson corners agree to tol (relative),
    or to the rounding floor of the sampled function values if that is larger.
    zero_limit_points controls how many scale points approaching 0+ feed the
    derivative-at-zero extrapolation.
    """
    dense_h0: float = 1e-3
    dense_ratio: float = 0.5
    dense_steps: int = 20
    richardson_depth: int = 2
    tol: float = 1e-9
    zero_limit_points: int = 12

    def __post_init__(self):
        if not (self.dense_h0 > 0 and 0 < self.dense_ratio < 1):
            raise ValueError("step sequence must be positive and shrinking")
        if self.dense_steps < 2 or self.richardson_depth < 1:
            raise ValueError("need at least two steps and one extrapolation level")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.zero_limit_points < 3:
            raise ValueError("need at least three points for the zero limit")


DEFAULT_CONFIG = DerivConfig()


@dataclass(frozen=True)
class AlphaOrder:
    """An order alpha > 0 split as alpha = n + beta with beta in (0, 1]."""
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def n(self) -> int:
        return math.ceil(self.alpha) - 1

    @property
    def beta(self) -> float:
        return self.alpha - self.n


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")


def _power(t: float, alpha: float) -> float:
    """t**(1-alpha); exactly 1.0 at alpha == 1 so order one degenerates cleanly."""
    if alpha == 1.0:
        return 1.0
    return t ** (1.0 - alpha)


def _dense_limit(g: Callable[[float], float], ts: TimeScale, t: float,
                 cfg: DerivConfig) -> float:
    """Limit of the difference quotient of g at a right-dense point t.

    Uses central quotients when the scale is a continuum on both sides of t
    (equivalent to averaging the two one-sided quotients), one-sided quotients
    at a continuum edge. Richardson extrapolation accelerates the sequence;
    convergence is declared against cfg.tol or against the cancellation noise
    floor of the sampled values, whichever is larger.
    """
    left_room, right_room = ts.continuum_reach(t)
    if left_room <= 0.0 and right_room <= 0.0:
        raise LimitDiverged(f"no continuum neighborhood of {t!r} inside the scale")
    h0 = cfg.dense_h0 * max(1.0, abs(t))
    if left_room >= 2 * h0 and right_room >= 2 * h0:
        mode = "central"
    elif right_room >= left_room:
        mode = "right"
        h0 = min(h0, right_room / 4.0)
    else:
        mode = "left"
        h0 = min(h0, left_room / 4.0)
    if mode == "central":
        p0, dp = 2, 2
        gt = None
    else:
        p0, dp = 1, 1
        gt = g(t)

    inv_ratio = 1.0 / cfg.dense_ratio
    table: list[list[float]] = []
    fmax = abs(gt) if gt is not None else 0.0
    prev_corner = math.nan
    h = h0
    for k in range(cfg.dense_steps):
        if mode == "central":
            a, b = g(t + h), g(t - h)
            quotient = (a - b) / (2.0 * h)
            fmax = max(fmax, abs(a), abs(b))
        elif mode == "right":
            a = g(t + h)
            quotient = (a - gt) / h
            fmax = max(fmax, abs(a))
        else:
            b = g(t - h)
            quotient = (gt - b) / h
            fmax = max(fmax, abs(b))
        row = [quotient]
        for j in range(1, min(k, cfg.richardson_depth) + 1):
            c = inv_ratio ** (p0 + (j - 1) * dp)
            row.append((c * row[j - 1] - table[k - 1][j - 1]) / (c - 1.0))
        table.append(row)
        corner = row[-1]
        if k >= 1:
            noise_floor = _NOISE_SAFETY * _EPS * fmax / h
            if abs(corner - prev_corner) <= max(cfg.tol * abs(corner), noise_floor):
                return corner
        prev_corner = corner
        h *= cfg.dense_ratio
    raise LimitDiverged(
        f"difference quotient did not stabilize in {cfg.dense_steps} steps at t={t!r}")


def _delta1(g: Callable[[float], float], ts: TimeScale, t: float,
            cfg: DerivConfig) -> float:
    """First delta derivative of a callable at t."""
    mu = ts.mu(t)
    if mu > 0.0:
        return (g(ts.sigma(t)) - g(t)) / mu
    return _dense_limit(g, ts, t, cfg)


def _require_point(ts: TimeScale, t: float) -> None:
    if not ts.contains(t):
        raise NotInScale(f"{t!r} is not a point of {ts!r}")
    if not ts.in_kappa(t):
        raise NotInKappa(f"{t!r} is a left-scattered maximum")


def t_alpha(f: Expr, ts: TimeScale, t: float, alpha: float,
            cfg: DerivConfig | None = None) -> float:
    """Conformable derivative of order alpha in (0, 1] at a point t > 0."""
    cfg = cfg or DEFAULT_CONFIG
    _check_alpha(alpha)
    if t <= 0.0:
        raise NonPositivePoint(
            f"order-{alpha} derivative needs t > 0, got {t!r}; "
            "use t_alpha_at_zero for t = 0")
    _require_point(ts, t)
    return _delta1(lambda x: evaluate(f, x), ts, t, cfg) * _power(t, alpha)


def _points_toward_zero(ts: TimeScale, count: int) -> list[float]:
    pts: list[float] = []
    x = 1.0
    for _ in range(count * 6):
        x *= 0.5
        s = ts.nearest(x)
        if s > 0.0 and ts.contains(s) and (not pts or s < pts[-1]):
            pts.append(s)
        if len(pts) >= count:
            break
    return pts


def _aitken_limit(vals: list[float]) -> tuple[float, float]:
    """Accelerated limit of a convergent sequence and an error estimate."""
    seq = list(vals)
    prev_last = seq[-1]
    for _ in range(3):
        if len(seq) < 3:
            break
        nxt = []
        for i in range(len(seq) - 2):
            d1 = seq[i + 1] - seq[i]
            d2 = seq[i + 2] - seq[i + 1]
            den = d2 - d1
            if abs(den) <= 1e-3 * (abs(d1) + abs(d2)) or den == 0.0:
                nxt.append(seq[i + 2])
            else:
                nxt.append(seq[i + 2] - d2 * d2 / den)
        prev_last = seq[-1]
        seq = nxt
    return seq[-1], abs(seq[-1] - prev_last)


def t_alpha_at_zero(f: Expr, ts: TimeScale, alpha: float,
                    cfg: DerivConfig | None = None) -> float:
    """Order-alpha derivative at 0, as the limit of t_alpha along t -> 0+.

    Requires 0 to be the minimum of the scale. Values are taken at scale
    points shrinking geometrically toward 0 and extrapolated.
    """
    cfg = cfg or DEFAULT_CONFIG
    _check_alpha(alpha)
    m = ts.minimum
    if m is None or abs(m) > 1e-12 or not ts.contains(0.0):
        raise ZeroNotInScale(f"0 is not the minimum of {ts!r}")
    pts = _points_toward_zero(ts, cfg.zero_limit_points)
    if len(pts) < 3:
        raise LimitDiverged("too few scale points approaching 0+")
    vals = [t_alpha(f, ts, x, alpha, cfg) for x in pts]
    if abs(vals[-1]) > 2.0 * abs(vals[0]) + 1.0:
        raise LimitDiverged("derivative values grow toward 0+; no finite limit")
    limit, err = _aitken_limit(vals)
    if err > max(cfg.tol * max(1.0, abs(limit)), 64.0 * _EPS * max(map(abs, vals))):
        raise LimitDiverged(f"zero-limit extrapolation error {err!r} above tolerance")
    return limit


def _delta_table(f: Expr, ts: TimeScale, t: float, n: int, cfg: DerivConfig,
                 syms: list[Expr]) -> float:
    """n-th delta derivative via the nested forward-quotient triangle.

    Right-dense points in the chain fall back to the exact classical
    derivative of matching order (the scale is a continuum there).
    """
    pts = [t]
    for _ in range(n):
        pts.append(ts.sigma(pts[-1]))
    level = [evaluate(f, x) for x in pts]
    for k in range(1, n + 1):
        nxt = []
        for i in range(n - k + 1):
            x = pts[i]
            mu = ts.mu(x)
            if mu > 0.0:
                nxt.append((level[i + 1] - level[i]) / mu)
            else:
                lroom, rroom = ts.continuum_reach(x)
                if lroom <= 0.0 and rroom <= 0.0:
                    raise NotInKappa(
                        f"{x!r} has no forward structure for a delta derivative")
                while len(syms) <= k:  # symbolic orders built only when needed
                    syms.append(d_dt(syms[-1]))
                nxt.append(evaluate(syms[k], x))
        level = nxt
    return level[0]


def delta_derivative_n(f: Expr, ts: TimeScale, t: float, n: int,
                       cfg: DerivConfig | None = None) -> float:
    """Iterated delta derivative of order n >= 1 at t."""
    cfg = cfg or DEFAULT_CONFIG
    if n < 1 or n != int(n):
        raise ValueError("n must be a positive integer")
    if not ts.contains(t):
        raise NotInScale(f"{t!r} is not a point of {ts!r}")
    if n == 1:
        return _delta1(lambda x: evaluate(f, x), ts, t, cfg)
    return _delta_table(f, ts, t, int(n), cfg, [f])


def t_alpha_higher_paths(f: Expr, ts: TimeScale, t: float, order: AlphaOrder,
                         cfg: DerivConfig | None = None) -> tuple[float, float]:
    """Both evaluations of a higher-order conformable derivative.

    The first value applies t**(1+n-alpha) to the (n+1)-th delta derivative;
    the second takes the order-beta derivative of the n-th delta derivative.
    They coincide in exact arithmetic.
    """
    cfg = cfg or DEFAULT_CONFIG
    n, beta = order.n, order.beta
    if n < 1:
        raise ValueError("order must exceed 1; use t_alpha below that")
    if t <= 0.0:
        raise NonPositivePoint(f"higher-order derivative needs t > 0, got {t!r}")
    _require_point(ts, t)

    factor = _power(t, beta)
    primary = factor * delta_derivative_n(f, ts, t, n + 1, cfg)

    syms: list[Expr] = [f]

    def g_n(x: float) -> float:
        return _delta_table(f, ts, x, n, cfg, syms)

    mu = ts.mu(t)
    if mu > 0.0:
        cross = (g_n(ts.sigma(t)) - g_n(t)) / mu * factor
    else:
        cross = _dense_limit(g_n, ts, t, cfg) * factor
    return primary, cross


def t_alpha_higher(f: Expr, ts: TimeScale, t: float, order: AlphaOrder,
                   cfg: DerivConfig | None = None) -> float:
    """Conformable derivative of order alpha in (n, n+1], cross-checked."""
    primary, cross = t_alpha_higher_paths(f, ts, t, order, cfg)
    scale = max(1.0, abs(primary), abs(cross))
    if abs(primary - cross) > HIGHER_ORDER_AGREEMENT_RTOL * scale:
        raise InternalDisagreement(
            f"higher-order paths disagree: {primary!r} vs {cross!r}")
    return primary


def power_rule(ts: TimeScale, t: float, alpha: float, m: int, c: float = 0.0,
               reciprocal: bool = False) -> float:
    """Closed-form derivative of (t-c)**m, or of its reciprocal.

    Serves as an independent oracle for t_alpha on the same functions.
    """
    _check_alpha(alpha)
    if m < 1 or m != int(m):
        raise ValueError("m must be a positive integer")
    if t <= 0.0:
        raise NonPositivePoint(f"power rule needs t > 0, got {t!r}")
    _require_point(ts, t)
    st = ts.sigma(t)
    if reciprocal:
        if (t - c) * (st - c) == 0.0:
            raise PoleAtPoint(f"reciprocal power has a pole at t={t!r}, c={c!r}")
        total = math.fsum(
            1.0 / ((st - c) ** (p + 1) * (t - c) ** (m - p)) for p in range(m))
        return -_power(t, alpha) * total
    total = math.fsum(
        (st - c) ** (m - 1 - p) * (t - c) ** p for p in range(m))
    return _power(t, alpha) * total


def sigma_shift(f: Expr, ts: TimeScale, t: float, alpha: float,
                cfg: DerivConfig | None = None) -> float:
    """f(t) + mu(t) * t**(alpha-1) * t_alpha(f)(t); equals f(sigma(t))."""
    value = t_alpha(f, ts, t, alpha, cfg)
    mu = ts.mu(t)
    return evaluate(f, t) + mu * t ** (alpha - 1.0) * value


def _bisect_root(fn: Callable[[float], float], lo: float, hi: float,
                 f_lo: float) -> float:
    sign_lo = f_lo > 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def chain_rule_witness(f: Expr, g: Expr, ts: TimeScale, t: float, alpha: float,
                       cfg: DerivConfig | None = None) -> float:
    """A point c in [t, sigma(t)] with T_alpha(f o g) = f'(g(c)) * T_alpha(g).

    Searches by bisection on the residual's sign change, falling back to a
    dense grid scan. Among admissible points the smallest is returned.
    """
    cfg = cfg or DEFAULT_CONFIG
    composed = substitute(f, g)
    lhs = t_alpha(composed, ts, t, alpha, cfg)
    tg = t_alpha(g, ts, t, alpha, cfg)
    fp = d_dt(f)
    st = ts.sigma(t)
    tol = 1e-8 * (1.0 + abs(lhs))

    def residual(c: float) -> float:
        return evaluate(fp, evaluate(g, c)) * tg - lhs

    r_lo = residual(t)
    if abs(r_lo) <= tol:
        return t
    if st == t:
        raise NoWitnessFound(
            f"dense point residual {r_lo!r} exceeds tolerance {tol!r}")
    r_hi = residual(st)
    if abs(r_hi) <= tol and (r_lo > 0) == (r_hi > 0):
        return st
    if (r_lo > 0) != (r_hi > 0):
        c = _bisect_root(residual, t, st, r_lo)
        if abs(residual(c)) <= tol:
            return c
    prev_c, prev_r = t, r_lo
    width = st - t
    for i in range(1, WITNESS_GRID_POINTS + 1):
        c_i = t + width * i / WITNESS_GRID_POINTS
        r_i = residual(c_i)
        if abs(r_i) <= tol:
            return c_i
        if (r_i > 0) != (prev_r > 0):
            c = _bisect_root(residual, prev_c, c_i, prev_r)
            if abs(residual(c)) <= tol:
                return c
        prev_c, prev_r = c_i, r_i
    raise NoWitnessFound(
        f"no c in [{t!r}, {st!r}] met the residual tolerance {tol!r}")


def naive_chain_gap(f: Expr, g: Expr, ts: TimeScale, t: float, alpha: float,
                    cfg: DerivConfig | None = None) -> float:
    """T_alpha(f o g)(t) - T_alpha(f)(g(t)) * T_alpha(g)(t).

    Nonzero in general: the classical chain-rule shape fails for this
    derivative, and this gap quantifies by how much.
    """
    cfg = cfg or DEFAULT_CONFIG
    composed = substitute(f, g)
    lhs = t_alpha(composed, ts, t, alpha, cfg)
    gt = evaluate(g, t)
    return lhs - t_alpha(f, ts, gt, alpha, cfg) * t_alpha(g, ts, t, alpha, cfg)
