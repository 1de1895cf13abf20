"""Acceptance criteria, one test per criterion.

Each test prints a PASS line once its assertions hold (visible with -s),
and pins the tolerances the criterion states. Criteria 1 and 8 carry
wall-clock bounds; criterion 9 bounds the randomized suites as a block.
"""

import math
import time

import pytest

from tscal.derivative import (
    AlphaOrder,
    chain_rule_witness,
    naive_chain_gap,
    t_alpha,
    t_alpha_at_zero,
    t_alpha_higher_paths,
)
from tscal.expr import Var, evaluate, parse, substitute
from tscal.integral import cauchy, monotonicity_check
from tscal.laws import definition_scan, run_law_suite
from tscal.timescale import (
    PeriodicUnion,
    QLatticeClosure,
    QPowers,
    RealInterval,
    UniformLattice,
)

SEED = 7
R = RealInterval()


def _ok(num, text):
    print(f"ACCEPTANCE {num:02d} PASS: {text}")


def rel_err(actual, expected):
    return abs(actual - expected) / max(abs(expected), 1e-300)


def test_criterion_01_lattice_square_formula():
    start = time.perf_counter()
    f = parse("t^2")
    checked = 0
    for h in (0.5, 1.0, 2.0):
        ts = UniformLattice(h)
        for k in range(1, 11):
            t = k * h
            for alpha in (0.25, 0.5, 0.75, 1.0):
                expected = (2 * t + h) * t ** (1 - alpha)
                assert rel_err(t_alpha(f, ts, t, alpha), expected) <= 1e-12
                checked += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _ok(1, f"(2t+h) t^(1-a) reproduced at {checked} lattice points in {elapsed:.3f}s")


def test_criterion_02_q_lattice_square_and_zero():
    f = parse("t^2")
    checked = 0
    for q in (2.0, 3.0):
        ts = QLatticeClosure(q)
        for k in range(-10, 11):
            t = q ** k
            for alpha in (0.3, 0.5, 0.8, 1.0):
                expected = (q + 1) * t ** (2 - alpha)
                assert rel_err(t_alpha(f, ts, t, alpha), expected) <= 1e-12
                checked += 1
        zero = t_alpha_at_zero(f, ts, 0.5)
        assert abs(zero) <= 1e-6
    _ok(2, f"(q+1) t^(2-a) reproduced at {checked} points; zero limit below 1e-6")


def test_criterion_03_q_powers_log_formula():
    f = parse("log(t)")
    checked = 0
    for q in (2.0, 5.0):
        ts = QPowers(q)
        for n in range(0, 13):
            t = q ** n
            for alpha in (0.3, 1.0):
                expected = math.log(q) / ((q - 1) * t ** alpha)
                assert rel_err(t_alpha(f, ts, t, alpha), expected) <= 1e-12
                checked += 1
    _ok(3, f"log derivative log(q)/((q-1) t^a) reproduced at {checked} points")


def test_criterion_04_dense_power_numerics():
    checked = 0
    for m in (1, 2, 3, 4):
        f = parse(f"t^{m}")
        rec = parse(f"1/t^{m}")
        for t in (0.5, 2.0, 7.0):
            for alpha in (0.25, 0.5, 0.75, 1.0):
                expected = m * t ** (m - alpha)
                assert rel_err(t_alpha(f, R, t, alpha), expected) <= 1e-7
                expected_rec = -m / t ** (m + alpha)
                assert rel_err(t_alpha(rec, R, t, alpha), expected_rec) <= 1e-7
                checked += 2
    _ok(4, f"dense-point powers and reciprocal powers within 1e-7 at {checked} cases")


def test_criterion_05_higher_order_both_paths():
    f = parse("t^3")
    order = AlphaOrder(2.1)
    checked = 0
    for h in (0.5, 1.0):
        ts = UniformLattice(h)
        for k in range(1, 9):
            t = k * h
            primary, cross = t_alpha_higher_paths(f, ts, t, order)
            expected = 6.0 * t ** 0.9
            assert rel_err(primary, expected) <= 1e-9
            assert rel_err(cross, expected) <= 1e-9
            assert abs(primary - cross) <= 1e-9 * max(1.0, abs(primary))
            checked += 1
    _ok(5, f"order-2.1 derivative equals 6 t^0.9 on both paths at {checked} points")


def test_criterion_06_chain_rule_witnesses():
    ts = QPowers(2.0)
    for t in (2.0, 4.0, 8.0):
        c = chain_rule_witness(parse("t^2"), parse("t"), ts, t, 0.5)
        assert abs(c / t - 1.5) <= 1e-8
    for t in (2.0, 4.0):
        c = chain_rule_witness(parse("t^2"), parse("t^2"), ts, t, 0.5)
        assert abs(c / t - math.sqrt(2.5)) <= 1e-8
        lhs = t_alpha(substitute(parse("t^2"), parse("t^2")), ts, t, 0.5)
        tg = t_alpha(parse("t^2"), ts, t, 0.5)
        resid = abs(2 * evaluate(parse("t^2"), c) * tg - lhs)
        assert resid <= 1e-8 * (1 + abs(lhs))
    _ok(6, "witness ratios c/t = 1.5 and sqrt(2.5) recovered within 1e-8")


def test_criterion_07_chain_rule_counterexample():
    gap = naive_chain_gap(Var(), Var(), UniformLattice(1.0), 4.0, 0.5)
    assert abs(gap - (-2.0)) <= 1e-12
    _ok(7, "naive chain gap at t=4, a=1/2 equals -2 exactly")


def test_criterion_08_model_integral():
    start = time.perf_counter()
    res = cauchy(parse("t"), R, 1.0, 10.0 ** (2.0 / 3.0), 0.5)
    elapsed = time.perf_counter() - start
    assert abs(res.value - 6.0) <= 1e-8
    assert elapsed < 1.0
    _ok(8, f"integral from 1 to 10^(2/3) equals 6 within 1e-8 in {elapsed:.3f}s")


def test_criterion_09_property_suites():
    start = time.perf_counter()
    laws = (
        "sum", "scalar", "product", "reciprocal", "quotient", "sigma_shift",
        "ftc", "integral_linearity", "integral_additivity",
        "integral_positivity", "integral_domination",
    )
    for law in laws:
        report = run_law_suite(law, trials=500, seed=SEED)
        assert report.passed, (law, report.failures[:3])

    # reversal: exactly antisymmetric by construction
    f = parse("t^2 - t + 2")
    cases = [
        (R, 0.5, 3.0), (UniformLattice(1.0), 1.0, 7.0),
        (QPowers(2.0), 1.0, 32.0), (QLatticeClosure(2.0), 0.25, 8.0),
        (PeriodicUnion(1.0, 2.0), 0.5, 6.5),
    ]
    for ts, a, b in cases:
        for alpha in (0.3, 0.7, 1.0):
            assert cauchy(f, ts, a, b, alpha).value == -cauchy(f, ts, b, a, alpha).value

    # monotonicity: zero violations on a corpus satisfying the hypothesis
    corpus = [
        (parse("t^2"), UniformLattice(1.0), 1.0, 10.0, 0.5),
        (parse("t^3 + 2*t"), QPowers(2.0), 1.0, 64.0, 0.4),
        (parse("log(t)"), QPowers(2.0), 1.0, 64.0, 0.3),
        (parse("t"), R, 0.5, 4.0, 0.7),
        (parse("exp(t/4)"), PeriodicUnion(1.0, 2.0), 0.5, 7.0, 0.6),
    ]
    for f, ts, a, b, alpha in corpus:
        report = monotonicity_check(f, ts, a, b, alpha)
        assert report.status == "monotone"
        assert not report.violations

    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _ok(9, f"11 law suites at 500 trials, reversal, monotonicity in {elapsed:.1f}s")


def test_criterion_10_definition_scan_soundness():
    cases = [
        (UniformLattice(1.0), "t^2", 2.0, 0.5),
        (UniformLattice(0.5), "t^3", 1.5, 0.25),
        (UniformLattice(2.0), "t^2 - t", 4.0, 1.0),
        (QPowers(2.0), "log(t)", 8.0, 0.5),
        (QPowers(3.0), "t^3", 9.0, 0.7),
        (QLatticeClosure(2.0), "t^2", 0.25, 0.4),
        (PeriodicUnion(1.0, 2.0), "t^2 + t", 1.0, 0.6),
    ]
    for ts, src, t, alpha in cases:
        f = parse(src)
        value = t_alpha(f, ts, t, alpha)
        assert definition_scan(f, ts, t, alpha, value, 1e-9)
        assert not definition_scan(f, ts, t, alpha, value + 1e-3, 1e-9)
        assert not definition_scan(f, ts, t, alpha, value - 1e-3, 1e-9)
    _ok(10, f"defining inequality accepts computed values and rejects +/-1e-3 "
            f"at {len(cases)} scattered points")
