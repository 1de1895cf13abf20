"""Conformable derivative: closed forms, limits, higher orders, witnesses."""

import math
import random

import pytest

from tscal.derivative import (
    AlphaOrder,
    DerivConfig,
    chain_rule_witness,
    delta_derivative_n,
    naive_chain_gap,
    power_rule,
    sigma_shift,
    t_alpha,
    t_alpha_at_zero,
    t_alpha_higher,
    t_alpha_higher_paths,
)
from tscal.errors import (
    LimitDiverged,
    NonPositivePoint,
    NotInKappa,
    NotInScale,
    PoleAtPoint,
    ZeroNotInScale,
)
from tscal.expr import evaluate, derivative as d_dt, parse
from tscal.timescale import (
    FiniteSet,
    PeriodicUnion,
    QLatticeClosure,
    QPowers,
    RealInterval,
    UniformLattice,
)

R = RealInterval()
HZ1 = UniformLattice(1.0)
QN2 = QPowers(2.0)
QZ2 = QLatticeClosure(2.0)


def rel(x, y):
    return abs(x - y) / max(1.0, abs(x), abs(y))


def test_square_on_uniform_lattice():
    # forward quotient of the square: (2t + h) * t**(1-alpha)
    v = t_alpha(parse("t^2"), HZ1, 2.0, 0.5)
    assert v == pytest.approx((2 * 2.0 + 1.0) * 2.0 ** 0.5, rel=1e-14)
    assert v == pytest.approx(7.0710678118654755, rel=1e-12)


def test_constants_differentiate_to_zero():
    c = parse("5")
    for ts, t in ((HZ1, 3.0), (QN2, 8.0), (R, 1.7), (PeriodicUnion(1.0, 2.0), 1.0)):
        for alpha in (0.25, 0.5, 1.0):
            assert t_alpha(c, ts, t, alpha) == 0.0


def test_cubic_dense_point():
    v = t_alpha(parse("t^3"), R, 2.0, 0.5)
    assert v == pytest.approx(3 * 2.0 ** 2.5, rel=1e-9)


def test_log_on_q_powers():
    v = t_alpha(parse("log(t)"), QN2, 8.0, 0.5)
    assert v == pytest.approx(math.log(2) / ((2 - 1) * 8.0 ** 0.5), rel=1e-13)


def test_t_alpha_preconditions():
    f = parse("t^2")
    with pytest.raises(NonPositivePoint):
        t_alpha(f, HZ1, -1.0, 0.5)
    with pytest.raises(NonPositivePoint):
        t_alpha(f, QZ2, 0.0, 0.5)
    with pytest.raises(NotInScale):
        t_alpha(f, HZ1, 2.5, 0.5)
    with pytest.raises(NotInKappa):
        t_alpha(f, FiniteSet((1.0, 2.0, 3.0)), 3.0, 0.5)
    with pytest.raises(ValueError):
        t_alpha(f, HZ1, 2.0, 1.5)


def test_alpha_one_is_plain_delta_derivative():
    rng = random.Random(5)
    scales = [HZ1, UniformLattice(0.5), QN2, QZ2, R, PeriodicUnion(1.0, 2.0)]
    sources = ("t^2", "t^3 - 2*t", "log(t) + t", "t^4")
    for _ in range(200):
        ts = rng.choice(scales)
        if isinstance(ts, RealInterval):
            t = rng.uniform(0.3, 5.0)
        elif isinstance(ts, UniformLattice):
            t = ts.h * rng.randint(1, 10)
        elif isinstance(ts, (QPowers, QLatticeClosure)):
            t = ts.q ** rng.randint(0, 5)
        else:
            t = rng.choice([1.0, 3.5, 4.0, 6.5])
        f = parse(rng.choice(sources))
        v1 = t_alpha(f, ts, t, 1.0)
        v2 = delta_derivative_n(f, ts, t, 1)
        assert abs(v1 - v2) <= 1e-12 * max(1.0, abs(v1), abs(v2))


def test_dense_points_match_classical_derivative():
    rng = random.Random(9)
    sources = ("t^2", "t^3", "t^4 - 3*t^2 + t", "log(t)", "t^2 * log(t)")
    for src in sources:
        f = parse(src)
        fp = d_dt(f)
        for _ in range(10):
            t = rng.uniform(0.1, 10.0)
            alpha = rng.uniform(0.1, 1.0)
            expected = evaluate(fp, t) * t ** (1 - alpha)
            assert rel(t_alpha(f, R, t, alpha), expected) <= 1e-6


def test_zero_limit_examples():
    f2 = parse("t^2")
    assert abs(t_alpha_at_zero(f2, QZ2, 0.5)) <= 1e-6
    assert abs(t_alpha_at_zero(parse("3"), QZ2, 0.7)) <= 1e-12
    # values along q**-k go as (q**-k)**(1-alpha) -> 0 by hand
    assert abs(t_alpha_at_zero(parse("t"), QZ2, 0.5)) <= 1e-6


def test_zero_limit_on_interval_starting_at_zero():
    v = t_alpha_at_zero(parse("t"), RealInterval(0.0, 4.0), 0.5)
    assert abs(v) <= 1e-5


def test_zero_limit_preconditions():
    f = parse("t^2")
    with pytest.raises(ZeroNotInScale):
        t_alpha_at_zero(f, QN2, 0.5)  # minimum is 1
    with pytest.raises(ZeroNotInScale):
        t_alpha_at_zero(f, HZ1, 0.5)  # 0 present but not a minimum
    with pytest.raises(LimitDiverged):
        t_alpha_at_zero(parse("log(t)"), QZ2, 0.5)
    with pytest.raises(LimitDiverged):
        t_alpha_at_zero(f, FiniteSet((0.0, 1.0, 2.0)), 0.5)


def test_delta_derivative_examples():
    # (t^3) twice on the unit lattice: 6t + 6h at t = 1
    assert delta_derivative_n(parse("t^3"), HZ1, 1.0, 2) == pytest.approx(12.0, rel=1e-14)
    assert delta_derivative_n(parse("t"), HZ1, 5.0, 1) == 1.0
    assert delta_derivative_n(parse("t"), R, 5.0, 1) == pytest.approx(1.0, rel=1e-9)
    # ((t+h)^2 - t^2)/h = 2t + h by hand: t=4, h=2 gives 10
    assert delta_derivative_n(parse("t^2"), UniformLattice(2.0), 4.0, 1) == pytest.approx(10.0, rel=1e-14)
    # dense case reduces to the classical second derivative
    assert delta_derivative_n(parse("t^3"), R, 2.0, 2) == pytest.approx(12.0, rel=1e-14)
    with pytest.raises(ValueError):
        delta_derivative_n(parse("t"), HZ1, 1.0, 0)
    with pytest.raises(NotInKappa):
        delta_derivative_n(parse("t^2"), FiniteSet((1.0, 2.0)), 1.0, 2)


def test_higher_order_example():
    f = parse("t^3")
    order = AlphaOrder(2.1)
    assert order.n == 2 and order.beta == pytest.approx(0.1)
    assert t_alpha_higher(f, HZ1, 1.0, order) == pytest.approx(6.0, rel=1e-12)
    assert t_alpha_higher(f, HZ1, 2.0, order) == pytest.approx(6 * 2.0 ** 0.9, rel=1e-12)
    assert t_alpha_higher(parse("7"), HZ1, 3.0, AlphaOrder(1.5)) == 0.0


def test_higher_order_paths_agree():
    f = parse("t^4 - t^2")
    for ts, t in ((HZ1, 2.0), (QN2, 4.0), (R, 1.5), (PeriodicUnion(1.0, 2.0), 1.0)):
        for alpha in (1.3, 2.1, 2.9):
            primary, cross = t_alpha_higher_paths(f, ts, t, AlphaOrder(alpha))
            assert rel(primary, cross) <= 1e-9


def test_higher_order_rejects_low_alpha():
    with pytest.raises(ValueError):
        t_alpha_higher(parse("t^2"), HZ1, 2.0, AlphaOrder(0.5))


def test_power_rule_examples():
    # alpha = 1, m = 2, c = 0 collapses to sigma(t) + t = 2t + h
    assert power_rule(HZ1, 2.0, 1.0, 2) == pytest.approx(5.0, rel=1e-15)
    assert power_rule(R, 2.0, 0.5, 3) == pytest.approx(3 * 2.0 ** 2.5, rel=1e-15)
    assert power_rule(R, 2.0, 0.5, 1, reciprocal=True) == pytest.approx(-1 / 2.0 ** 1.5, rel=1e-15)
    with pytest.raises(PoleAtPoint):
        power_rule(HZ1, 2.0, 0.5, 2, c=2.0, reciprocal=True)
    with pytest.raises(PoleAtPoint):
        power_rule(HZ1, 2.0, 0.5, 2, c=3.0, reciprocal=True)


def test_power_rule_against_t_alpha_grid():
    for ts, t in ((HZ1, 2.0), (UniformLattice(0.5), 1.5), (QN2, 4.0), (R, 2.0)):
        for m in (1, 2, 3, 4):
            for c in (0.0, 1.0, -1.0):
                for alpha in (0.3, 0.7, 1.0):
                    expected = power_rule(ts, t, alpha, m, c)
                    actual = t_alpha(parse(f"(t - {c!r})^{m}"), ts, t, alpha)
                    assert rel(actual, expected) <= 1e-10


def test_square_shifted_by_one_follows_the_two_term_form():
    # (t-1)^2 differentiates to t**(1-a) * ((sigma-1) + (t-1)); the lattice
    # quotient must reproduce exactly that closed form
    for t in (2.0, 3.0, 5.0):
        st = t + 1.0
        for alpha in (0.4, 1.0):
            expected = t ** (1 - alpha) * ((st - 1.0) + (t - 1.0))
            assert rel(t_alpha(parse("(t-1)^2"), HZ1, t, alpha), expected) <= 1e-13


def test_sigma_shift_examples():
    # hand check: 4 + 1 * 2**-0.5 * 7.0710678... = 9 = f(3)
    assert sigma_shift(parse("t^2"), HZ1, 2.0, 0.5) == pytest.approx(9.0, rel=1e-12)
    assert sigma_shift(parse("t"), R, 5.0, 0.7) == pytest.approx(5.0, rel=1e-12)
    assert sigma_shift(parse("4"), QN2, 8.0, 0.3) == pytest.approx(4.0, rel=1e-12)


def test_sigma_shift_equals_f_sigma_on_scattered_points():
    rng = random.Random(13)
    for _ in range(50):
        ts = rng.choice([HZ1, QN2, QZ2, PeriodicUnion(1.0, 2.0)])
        if isinstance(ts, UniformLattice):
            t = float(rng.randint(1, 9))
        elif isinstance(ts, PeriodicUnion):
            t = rng.randint(0, 3) * 3.0 + 1.0
        else:
            t = ts.q ** rng.randint(0, 5)
        f = parse("t^3 - 2*t + 1")
        alpha = rng.uniform(0.1, 1.0)
        assert rel(sigma_shift(f, ts, t, alpha), evaluate(f, ts.sigma(t))) <= 1e-10


def test_chain_witness_examples():
    # T(f o g) = 3 t**(1-a), T(g) = t**(1-a), f'(x) = 2x: c = 1.5 t
    c = chain_rule_witness(parse("t^2"), parse("t"), QN2, 4.0, 0.5)
    assert c == pytest.approx(6.0, abs=1e-8)
    # f = g = t^2: 15 t**(4-a) = 2 c^2 * 3 t**(2-a): c = sqrt(5/2) t
    c = chain_rule_witness(parse("t^2"), parse("t^2"), QN2, 2.0, 0.5)
    assert c == pytest.approx(math.sqrt(2.5) * 2.0, abs=1e-8)
    # dense identity: interval degenerates to a point
    c = chain_rule_witness(parse("t"), parse("t"), R, 3.0, 1.0)
    assert c == 3.0


def test_chain_witness_degenerate_constant_inner():
    c = chain_rule_witness(parse("t^2"), parse("4"), HZ1, 2.0, 0.5)
    assert c == 2.0


def test_chain_witness_stays_in_interval():
    rng = random.Random(17)
    for _ in range(60):
        ts = rng.choice([HZ1, QN2, QZ2])
        t = ts.q ** rng.randint(0, 4) if hasattr(ts, "q") else float(rng.randint(1, 8))
        f = parse(rng.choice(("t^2", "t^3", "t^2 + t")))
        g = parse(rng.choice(("t", "t^2", "2*t + 1")))
        alpha = rng.uniform(0.2, 1.0)
        c = chain_rule_witness(f, g, ts, t, alpha)
        assert t <= c <= ts.sigma(t)


def test_naive_chain_gap_examples():
    # composite gives t**(1-a) = 2 while the chained product gives t**(2-2a) = 4
    gap = naive_chain_gap(parse("t"), parse("t"), HZ1, 4.0, 0.5)
    assert gap == pytest.approx(-2.0, abs=1e-12)
    assert abs(naive_chain_gap(parse("t"), parse("t"), R, 1.0, 0.5)) <= 1e-9
    assert naive_chain_gap(parse("t"), parse("t"), HZ1, 9.0, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_dense_limit_diverges_without_neighborhood():
    with pytest.raises(LimitDiverged):
        t_alpha(parse("t^2"), FiniteSet((1.0,)), 1.0, 0.5)


def test_q_lattice_square_closed_form():
    for q in (2.0, 3.0):
        ts = QLatticeClosure(q)
        f = parse("t^2")
        for k in range(-6, 7):
            t = q ** k
            for alpha in (0.3, 0.8, 1.0):
                expected = (q + 1) * t ** (2 - alpha)
                assert rel(t_alpha(f, ts, t, alpha), expected) <= 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        DerivConfig(dense_h0=0.0)
    with pytest.raises(ValueError):
        DerivConfig(tol=-1.0)
    with pytest.raises(ValueError):
        AlphaOrder(0.0)
