"""Cauchy and indefinite integrals of order alpha on time scales.

The order-alpha integral of f is the delta integral of f(t) * t**(alpha-1).
Over an isolated jump that is an exact product with the graininess; over a
continuum segment it is adaptive Simpson quadrature. Endpoints at 0 with
alpha < 1 are integrable singularities handled by geometric subdivision, and
geometric lattices accumulating at 0 are summed as a series with a tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .errors import (
    EndpointSingularity,
    NonPositivePoint,
    NotInKappa,
    NotInScale,
    QuadratureBudgetExceeded,
    ReversedBounds,
)
from .derivative import DerivConfig, t_alpha
from .expr import Expr, evaluate
from .timescale import (
    Jump,
    QLatticeClosure,
    TimeScale,
    membership_tolerance,
)

__all__ = [
    "IntegralConfig", "IntegralResult", "cauchy", "single_grain", "indefinite",
    "ftc_check", "FtcReport", "monotonicity_check", "MonotonicityReport",
]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class IntegralConfig:
    """Quadrature policy.

    quad_tol is the target error per integral (used both absolutely and
    relatively by the Simpson refinement); max_subdivisions bounds the total
    number of adaptive panels; q_tail_cutoff is the smallest geometric-lattice
    point enumerated near 0 (q**-64 when omitted).
    """
    quad_tol: float = 1e-10
    max_subdivisions: int = 1 << 20
    q_tail_cutoff: float | None = None

    def __post_init__(self):
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_CONFIG = IntegralConfig()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    est_error: float
    cells_used: int


def _weight(t: float, alpha: float) -> float:
    """The integrand factor t**(alpha-1); exactly 1.0 at alpha == 1."""
    if alpha == 1.0:
        return 1.0
    return t ** (alpha - 1.0)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")


def _adaptive_simpson(h: Callable[[float], float], lo: float, hi: float,
                      tol: float, budget: list[int]) -> tuple[float, float]:
    """Adaptive Simpson on [lo, hi]; returns (value, error estimate)."""
    if lo == hi:
        return 0.0, 0.0
    f_lo, f_hi = h(lo), h(hi)
    mid = 0.5 * (lo + hi)
    f_mid = h(mid)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    stack = [(lo, hi, f_lo, f_mid, f_hi, whole, tol)]
    values: list[float] = []
    errors: list[float] = []
    while stack:
        a, b, fa, fm, fb, s, tol_k = stack.pop()
        budget[0] -= 1
        if budget[0] < 0:
            raise QuadratureBudgetExceeded(
                "adaptive quadrature exhausted its subdivision budget")
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = h(lm), h(rm)
        s_l = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        s_r = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = s_l + s_r - s
        too_narrow = (b - a) <= 8.0 * _EPS * max(abs(a), abs(b), 1.0)
        if abs(delta) <= 15.0 * tol_k or too_narrow:
            values.append(s_l + s_r + delta / 15.0)
            errors.append(abs(delta) / 15.0)
        else:
            half = 0.5 * tol_k
            stack.append((m, b, fm, frm, fb, s_r, half))
            stack.append((a, m, fa, flm, fm, s_l, half))
    return math.fsum(values), math.fsum(errors)


def _improper_ladder(h: Callable[[float], float], hi: float, alpha: float,
                     tol: float, budget: list[int]) -> tuple[float, float]:
    """Integral over (0, hi] of an integrand behaving like t**(alpha-1) near 0.

    Sums geometric pieces [hi/2**(k+1), hi/2**k]; the piece magnitudes decay
    like 2**(-alpha) per level, so the remaining tail is bounded by the last
    piece times r/(1-r). Divergent integrands are detected and rejected.
    """
    values: list[float] = []
    errors: list[float] = []
    r_theory = 0.5 ** alpha
    top = hi
    prev_mag = None
    growth_streak = 0
    for level in range(4000):
        lo = 0.5 * top
        piece_tol = tol * 0.5 ** (level + 3)
        v, e = _adaptive_simpson(h, lo, top, piece_tol, budget)
        values.append(v)
        errors.append(e)
        mag = abs(v)
        if prev_mag is not None and mag > prev_mag * 1.02:
            growth_streak += 1
            if growth_streak >= 8:
                raise EndpointSingularity(
                    "integrand pieces grow toward 0; integral diverges")
        else:
            growth_streak = 0
        ratio = r_theory
        if prev_mag is not None and prev_mag > 0.0:
            ratio = min(max(mag / prev_mag, r_theory), 0.97)
        tail = mag * ratio / (1.0 - ratio)
        if tail <= 0.5 * tol or mag == 0.0:
            errors.append(tail)
            break
        prev_mag = mag
        top = lo
    else:
        raise EndpointSingularity(
            "tail toward the 0 endpoint did not converge below quad_tol")
    return math.fsum(values), math.fsum(errors)


def _segment_piece(f: Expr, alpha: float, lo: float, hi: float,
                   cfg: IntegralConfig, budget: list[int]) -> tuple[float, float]:
    def integrand(x: float) -> float:
        return evaluate(f, x) * _weight(x, alpha)

    if lo == 0.0 and alpha < 1.0:
        return _improper_ladder(integrand, hi, alpha, cfg.quad_tol, budget)
    return _adaptive_simpson(integrand, lo, hi, cfg.quad_tol, budget)


def _q_series_from_zero(f: Expr, ts: QLatticeClosure, hi: float, alpha: float,
                        cfg: IntegralConfig) -> tuple[float, float, int]:
    """Jump-series value of the integral over [0, hi] on q**Z with 0 attached.

    Terms f(q**j) * (q**j)**(alpha-1) * mu(q**j) are summed downward from hi
    until the geometric tail bound drops below quad_tol or the enumeration
    cutoff is reached.
    """
    q = ts.q
    cutoff = cfg.q_tail_cutoff if cfg.q_tail_cutoff is not None else q ** -64.0
    r_theory = q ** (-alpha)
    k_top = round(math.log(hi) / math.log(q))
    terms: list[float] = []
    prev_mag = None
    j = k_top - 1
    while True:
        t_j = q ** j
        term = evaluate(f, t_j) * _weight(t_j, alpha) * ((q - 1.0) * t_j)
        terms.append(term)
        mag = abs(term)
        ratio = r_theory
        if prev_mag is not None and prev_mag > 0.0:
            ratio = max(mag / prev_mag, r_theory)
        converging = ratio < 0.995
        tail = mag * ratio / (1.0 - ratio) if converging else math.inf
        if converging and (tail <= 0.5 * cfg.quad_tol or mag == 0.0):
            break
        if t_j <= cutoff:
            if tail > cfg.quad_tol:
                raise EndpointSingularity(
                    f"series tail bound {tail!r} above quad_tol at the "
                    f"enumeration cutoff; deepen q_tail_cutoff or loosen quad_tol")
            break
        prev_mag = mag
        j -= 1
    value = math.fsum(reversed(terms))
    return value, tail, len(terms)


def cauchy(f: Expr, ts: TimeScale, a: float, b: float, alpha: float,
           cfg: IntegralConfig | None = None) -> IntegralResult:
    """Integral of f of order alpha from a to b, both scale points >= 0.

    Computed over the sorted endpoints and signed afterward, so reversing the
    bounds negates the value exactly.
    """
    cfg = cfg or DEFAULT_CONFIG
    _check_alpha(alpha)
    for endpoint in (a, b):
        if not ts.contains(endpoint):
            raise NotInScale(f"{endpoint!r} is not a point of {ts!r}")
        if endpoint < -membership_tolerance(endpoint):
            raise NonPositivePoint(f"integral endpoints must be >= 0, got {endpoint!r}")
    if a == b:
        return IntegralResult(0.0, 0.0, 0)
    sign = 1.0 if a < b else -1.0
    lo, hi = (a, b) if a < b else (b, a)

    if isinstance(ts, QLatticeClosure) and lo == 0.0:
        value, err, cells = _q_series_from_zero(f, ts, hi, alpha, cfg)
        return IntegralResult(sign * value, err, cells)

    budget = [cfg.max_subdivisions]
    contributions: list[float] = []
    err_parts: list[float] = []
    cells = ts.decompose(lo, hi)
    for cell in cells:
        if isinstance(cell, Jump):
            if cell.t == 0.0 and alpha < 1.0:
                raise EndpointSingularity(
                    "an isolated jump at 0 has no finite order-alpha weight")
            contributions.append(
                evaluate(f, cell.t) * _weight(cell.t, alpha) * (cell.sigma_t - cell.t))
        else:
            v, e = _segment_piece(f, alpha, cell.lo, cell.hi, cfg, budget)
            contributions.append(v)
            err_parts.append(e)
    value = math.fsum(contributions)
    return IntegralResult(sign * value, math.fsum(err_parts), len(cells))


def single_grain(f: Expr, ts: TimeScale, t: float, alpha: float) -> float:
    """Integral over one grain [t, sigma(t)]: f(t) * mu(t) * t**(alpha-1)."""
    _check_alpha(alpha)
    if t <= 0.0:
        raise NonPositivePoint(f"single grain needs t > 0, got {t!r}")
    if not ts.contains(t):
        raise NotInScale(f"{t!r} is not a point of {ts!r}")
    if not ts.in_kappa(t):
        raise NotInKappa(f"{t!r} is a left-scattered maximum")
    return evaluate(f, t) * ts.mu(t) * _weight(t, alpha)


def indefinite(f: Expr, ts: TimeScale, base: float, t: float, alpha: float,
               cfg: IntegralConfig | None = None) -> float:
    """Accumulator F(t) normalized so F(base) = 0."""
    return cauchy(f, ts, base, t, alpha, cfg).value


@dataclass(frozen=True)
class FtcEntry:
    t: float
    expected: float
    actual: float
    rel_deviation: float


@dataclass(frozen=True)
class FtcReport:
    alpha: float
    entries: tuple[FtcEntry, ...]
    failures: tuple[tuple[float, str], ...]
    max_rel_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return not self.failures and self.max_rel_deviation <= self.tolerance


FTC_TOLERANCE = 1e-6


def _ftc_dense_value(f: Expr, ts: TimeScale, t: float, alpha: float,
                     dcfg: DerivConfig, icfg: IntegralConfig) -> float:
    """Derivative of the integral accumulator at a right-dense point.

    Quotients are formed from short local integrals so no large-value
    cancellation occurs, then Richardson-extrapolated.
    """
    tight = replace(icfg, quad_tol=max(icfg.quad_tol * 1e-3, 1e-14))

    def local(lo: float, hi: float) -> float:
        return cauchy(f, ts, lo, hi, alpha, tight).value

    left_room, right_room = ts.continuum_reach(t)
    h0 = 1e-3 * max(1.0, abs(t))
    if left_room >= 2 * h0 and right_room >= 2 * h0:
        mode, p0 = "central", 2
    elif right_room >= left_room:
        mode, p0 = "right", 1
        h0 = min(h0, right_room / 4.0)
    else:
        mode, p0 = "left", 1
        h0 = min(h0, left_room / 4.0)

    table: list[list[float]] = []
    prev = math.nan
    h = h0
    for k in range(10):
        if mode == "central":
            quotient = local(t - h, t + h) / (2.0 * h)
        elif mode == "right":
            quotient = local(t, t + h) / h
        else:
            quotient = local(t - h, t) / h
        row = [quotient]
        for j in range(1, min(k, 2) + 1):
            c = 2.0 ** (p0 + (j - 1) * p0)
            row.append((c * row[j - 1] - table[k - 1][j - 1]) / (c - 1.0))
        table.append(row)
        corner = row[-1]
        noise = 8.0 * tight.quad_tol / h
        if k >= 1 and abs(corner - prev) <= max(1e-9 * abs(corner), noise):
            break
        prev = corner
        h *= 0.5
    return table[-1][-1] * (t ** (1.0 - alpha) if alpha != 1.0 else 1.0)


def ftc_check(f: Expr, ts: TimeScale, points: list[float], alpha: float,
              dcfg: DerivConfig | None = None,
              icfg: IntegralConfig | None = None) -> FtcReport:
    """Differentiate the integral accumulator at each point and compare to f.

    Scattered points use the exact jump quotient of the accumulator; dense
    points differentiate it numerically. Per-point errors are collected, never
    raised.
    """
    dcfg = dcfg or DerivConfig()
    icfg = icfg or DEFAULT_CONFIG
    entries: list[FtcEntry] = []
    failures: list[tuple[float, str]] = []
    for t in points:
        try:
            if not ts.contains(t):
                raise NotInScale(f"{t!r} is not a point of {ts!r}")
            if t <= 0.0:
                raise NonPositivePoint(f"needs t > 0, got {t!r}")
            if not ts.in_kappa(t):
                raise NotInKappa(f"{t!r} is a left-scattered maximum")
            expected = evaluate(f, t)
            mu = ts.mu(t)
            if mu > 0.0:
                grain = cauchy(f, ts, t, ts.sigma(t), alpha, icfg).value
                actual = grain / mu * (t ** (1.0 - alpha) if alpha != 1.0 else 1.0)
            else:
                actual = _ftc_dense_value(f, ts, t, alpha, dcfg, icfg)
            dev = abs(actual - expected) / max(1.0, abs(expected))
            entries.append(FtcEntry(t, expected, actual, dev))
        except Exception as exc:  # noqa: BLE001 - aggregate, never abort
            failures.append((t, f"{type(exc).__name__}: {exc}"))
    max_dev = max((e.rel_deviation for e in entries), default=0.0)
    return FtcReport(alpha, tuple(entries), tuple(failures), max_dev, FTC_TOLERANCE)


@dataclass(frozen=True)
class MonotonicityReport:
    status: str  # "monotone" | "hypothesis-violated" | "violations-found"
    hypothesis_ok: bool
    derivative_min: float
    violations: tuple[tuple[float, float, float, float], ...]
    samples_used: int


HYPOTHESIS_TOL = 1e-12
MONOTONE_TOL = 1e-10
_CONTINUUM_SAMPLES = 512
_MAX_SAMPLES = 10_000


def _sample_scale_points(ts: TimeScale, lo: float, hi: float) -> list[float]:
    """In-scale sample of [lo, hi]: every isolated point up to a cap, plus
    uniform fills on continuum segments."""
    cells = ts.decompose(lo, hi, max_cells=1 << 21)
    points: list[float] = [lo]
    jumps = [c for c in cells if isinstance(c, Jump)]
    stride = max(1, math.ceil(len(jumps) / _MAX_SAMPLES))
    for idx, cell in enumerate(cells):
        if isinstance(cell, Jump):
            if idx % stride == 0:
                points.append(cell.t)
            points.append(cell.sigma_t)
        else:
            n = _CONTINUUM_SAMPLES
            width = cell.hi - cell.lo
            points.extend(cell.lo + width * i / n for i in range(n + 1))
    points.append(hi)
    out: list[float] = []
    for p in sorted(points):
        if not out or p > out[-1]:
            out.append(p)
    if len(out) > _MAX_SAMPLES:
        stride = math.ceil(len(out) / _MAX_SAMPLES)
        out = out[::stride] + [out[-1]]
    return out


def monotonicity_check(f: Expr, ts: TimeScale, a: float, b: float, alpha: float,
                       cfg: DerivConfig | None = None) -> MonotonicityReport:
    """If the order-alpha derivative is nonnegative on [a, b], f must increase.

    Samples the scale within [a, b]; when the derivative hypothesis holds at
    every sample, scans for ordered pairs where f decreases beyond tolerance.
    """
    cfg = cfg or DerivConfig()
    _check_alpha(alpha)
    if not ts.contains(a) or not ts.contains(b):
        raise NotInScale(f"bounds must be scale points: {a!r}, {b!r}")
    if a >= b:
        raise ReversedBounds(f"need a < b, got {a!r} >= {b!r}")
    if a <= 0.0:
        raise NonPositivePoint(f"needs a > 0, got {a!r}")
    samples = _sample_scale_points(ts, a, b)
    deriv_min = math.inf
    for t in samples:
        if t <= 0.0 or not ts.in_kappa(t):
            continue
        deriv_min = min(deriv_min, t_alpha(f, ts, t, alpha, cfg))
    hypothesis_ok = deriv_min >= -HYPOTHESIS_TOL
    if not hypothesis_ok:
        return MonotonicityReport("hypothesis-violated", False, deriv_min,
                                  (), len(samples))
    violations: list[tuple[float, float, float, float]] = []
    run_max_t = samples[0]
    run_max_f = evaluate(f, samples[0])
    for t in samples[1:]:
        ft = evaluate(f, t)
        if run_max_f > ft + MONOTONE_TOL * (1.0 + abs(ft)):
            violations.append((run_max_t, t, run_max_f, ft))
        if ft > run_max_f:
            run_max_t, run_max_f = t, ft
    status = "monotone" if not violations else "violations-found"
    return MonotonicityReport(status, True, deriv_min, tuple(violations),
                              len(samples))
