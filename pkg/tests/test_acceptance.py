"""Acceptance criteria, one test each.

Every test records a single ``PASS criterion k: ...`` or ``FAIL criterion k: ...``
line; the lines are printed together at the end of the pytest run and inline
when running with ``-s``.  Criteria that do not hold for the computed data are
marked ``xfail(strict=True)``: they assert the full criterion and are expected
to fail, so an unexpected pass also breaks the run.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wpvol import CacheError, CoeffTable, PiPoly, coeff, ensure, fill, load, save
from wpvol import asymptotics as asy
from wpvol import checks
from wpvol import discrete as dsc
from wpvol.recursion import term_A, term_B, term_C
from wpvol.store import dumps, loads

pytestmark = pytest.mark.slow

G_RANGE = range(2, 9)
N_VALUES = (1, 2)


@pytest.fixture
def verdict(acceptance_lines):
    def record(k: int, ok: bool, text: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {text}"
        acceptance_lines[k] = line
        print(line)
        return ok

    return record


def summary(results) -> str:
    return "; ".join(f"{'ok' if ok else 'NOT OK'} {text}" for res in results for ok, text in res.lines)


# -- 1 --------------------------------------------------------------------------------------------

@given(st.fractions(min_value=0, max_value=20, max_denominator=50))
def test_base_polynomial_at_random_length(x):
    table = CoeffTable("paper")
    assert asy.eval_volume_exact((1, 1), (x,), table) == PiPoly({1: Fraction(1, 6), 0: x * x / 24})
    assert asy.eval_volume_exact((0, 3), (x, x + 1, 2 * x), table) == PiPoly.one()


def test_criterion_1_exact_values(verdict, desk_table):
    t = desk_table
    parts = {
        "V_{0,3} = 1": coeff((0, 3), (0, 0, 0), t) == PiPoly.one(),
        "V_{1,1}(x) = pi^2/6 + x^2/24": coeff((1, 1), (0,), t) == PiPoly({1: Fraction(1, 6)})
        # the x^2 weight is x^2/24, so its coefficient is 1
        and coeff((1, 1), (1,), t) == PiPoly.one(),
        "V_{0,4}(x) = 2 pi^2 + (1/2) sum x_i^2": all(
            asy.eval_volume_exact((0, 4), x, t) == PiPoly({1: 2, 0: sum(v * v for v in x) / 2})
            for x in product((Fraction(0), Fraction(1), Fraction(5, 3)), repeat=4)
        ),
        # hand recursion: A = 17 pi^4/90, B = 7 pi^4/45, no C term
        "c_{1,2}(0,0) = 17 pi^4/90 + 7 pi^4/45": term_A((1, 2), (0, 0), 2, t) == PiPoly({2: Fraction(17, 90)})
        and term_B((1, 2), (0, 0), t) == PiPoly({2: Fraction(7, 45)})
        and term_C((1, 2), (0, 0), t).is_zero()
        and coeff((1, 2), (0, 0), t) == PiPoly({2: Fraction(31, 90)}),
    }
    ok = all(parts.values())
    verdict(1, ok, ", ".join(f"{k} {'ok' if v else 'NOT OK'}" for k, v in parts.items()))
    assert ok


# -- 2 --------------------------------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="permutation symmetry fails for the default V_{1,1} base case")
def test_criterion_2_structural_invariants(verdict, desk_table):
    results = [checks.check_structure(desk_table), checks.check_symmetry(desk_table)]
    ok = all(r.passed for r in results)
    verdict(2, ok, f"{len(desk_table)} coefficients: " + summary(results))
    assert ok


# -- 3 --------------------------------------------------------------------------------------------

def test_criterion_3_cusp_ratio_window(verdict, desk_table):
    res = checks.check_cusp_ratios(desk_table)
    verdict(3, res.passed, summary([res]))
    assert res.passed


# -- 4 --------------------------------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="the scaled u gaps keep rising past i = 5")
def test_criterion_4_u_sequence(verdict):
    res = checks.check_u_sequence(i_max=30)
    # the first three lines are the criterion; the fourth is the sound replacement bound
    ok = all(passed for passed, _ in res.lines[:3])
    verdict(4, ok, summary([res]))
    assert ok


# -- 5 --------------------------------------------------------------------------------------------

def test_criterion_5_identities(verdict):
    res = checks.check_identities(box=6, m_max=3, trials=100)
    verdict(5, res.passed, summary([res]))
    assert res.passed


# -- 6, 7 -----------------------------------------------------------------------------------------

def _trend_lines(order: str, table, **kw):
    reports = {}
    for n in N_VALUES:
        sups = checks.residual_sups(n, G_RANGE, table, order, **kw)
        reports[n] = (sups, asy.trend_verdict(sups))
    return reports


def test_criterion_6_first_order_residual(verdict, desk_table):
    reports = _trend_lines("R0", desk_table)
    finite = all(mpmath.isfinite(v) for sups, _ in reports.values() for v in sups.values())
    ok = finite and all(rep.passed for _, rep in reports.values())
    text = "; ".join(f"n={n}: {rep.summary()}" for n, (_, rep) in reports.items())
    verdict(6, ok, f"finite={finite}; {text}")
    assert ok


def test_criterion_7_second_order(verdict, desk_table):
    reports = _trend_lines("R1", desk_table)
    gaps = checks.convergence_gaps(desk_table, range(4, 13), Fraction(2))
    seq = [gaps[g] for g in range(4, 13)]
    decreasing = all(b < a for a, b in zip(seq, seq[1:]))
    ok = decreasing and all(rep.passed for _, rep in reports.values())
    text = "; ".join(f"R1 n={n}: {rep.summary()}" for n, (_, rep) in reports.items())
    verdict(7, ok, f"{text}; |g (ratio - F0) - f1| at x=2 from {mpmath.nstr(seq[0], 5)} (g=4) to "
                   f"{mpmath.nstr(seq[-1], 5)} (g=12), strictly decreasing={decreasing}")
    assert ok


# -- 8 --------------------------------------------------------------------------------------------

def _even_series_coefficient(kind: str, j: int) -> Fraction:
    # coefficient of x^(2j) in cosh(x/2) or sinh(x/2)/(x/2)
    if kind == "plus":
        return Fraction(1, 4 ** j * math.factorial(2 * j))
    return Fraction(1, 4 ** j * math.factorial(2 * j + 1))


def approximant_coefficient(approx: dsc.Approximant, alpha) -> PiPoly:
    """Coefficient of the weight ``prod x_i^(2 alpha_i) / (4^alpha_i (2 alpha_i + 1)!)`` in ``V * FN``."""
    total = PiPoly.zero()
    for (m, plus, minus), value in approx.terms.items():
        scale = Fraction(1)
        for i, b in enumerate(alpha):
            rest = 2 * b - m[i]
            if rest < 0:
                scale = 0
                break
            if i in plus:
                scale *= _even_series_coefficient("plus", rest // 2)
            elif i in minus:
                scale *= _even_series_coefficient("minus", rest // 2)
            elif rest:
                scale = 0
                break
            scale *= 4 ** b * math.factorial(2 * b + 1)
        if scale:
            total = total + value * scale
    return total


def test_criterion_8_constructive_approximant(verdict, desk_table):
    N = 1
    a = 2 * N + 2
    exact_low = at_one = degree_ok = True
    count = 0
    for n in N_VALUES:
        for g in G_RANGE:
            approx = dsc.build_FN((g, n), N, a, desk_table)
            at_one &= approx.is_one_at_zero()
            degree_ok &= approx.hyperbolic_degree() <= 2 * N
            for alpha in product(range(a), repeat=n):
                exact_low &= approximant_coefficient(approx, alpha) == coeff((g, n), alpha, desk_table)
                count += 1
    reports = _trend_lines("RN", desk_table, N=N, a=a)
    trend = all(rep.passed for _, rep in reports.values())
    ok = exact_low and at_one and degree_ok and trend
    text = "; ".join(f"RN n={n}: {rep.summary()}" for n, (_, rep) in reports.items())
    verdict(8, ok, f"N={N}, a={a}: c~ = c on {count} low coefficients {exact_low}, FN(0) = 1 {at_one}, "
                   f"degree <= 2N {degree_ok}; {text}")
    assert ok


# -- 9 --------------------------------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="the sup statistic at the smallest genus is below half its plateau")
def test_criterion_9_derivative_statistic(verdict, desk_table, check_config):
    res = checks.check_derivative_bounds(desk_table, check_config)
    failed = [text for passed, text in res.lines if not passed]
    verdict(9, res.passed, f"{len(res.lines) - len(failed)}/{len(res.lines)} configurations pass"
                           + (f"; failing: {' | '.join(failed)}" if failed else ""))
    assert res.passed


# -- 10 -------------------------------------------------------------------------------------------

def test_criterion_10_cut_sums(verdict, desk_table, check_config):
    res = checks.check_cut_sums(desk_table, check_config, orders=2)
    worst = max(
        (text for _, text in res.lines),
        key=lambda t: float(t.split("max/first = ")[1].split()[0]),
    )
    verdict(10, res.passed, f"{len(res.lines)} configurations, worst {worst}")
    assert res.passed


# -- 11 -------------------------------------------------------------------------------------------

def test_criterion_11_persistence(verdict, desk_table, tmp_path):
    path = tmp_path / "desk.txt"
    save(desk_table, path)
    first = path.read_bytes()
    reloaded = load(path, "paper")
    save(reloaded, path)
    round_trip = path.read_bytes() == first and dict(reloaded.items()) == dict(desk_table.items())

    fill(reloaded, 12, 5)
    for g in range(2, 13):
        ensure((g, 1), reloaded)
    warm = reloaded.computed == 0

    small = CoeffTable("paper")
    fill(small, 4, 3)
    data = dumps(small)
    rejected = 0
    for i in range(len(data)):
        corrupted = bytearray(data)
        corrupted[i] ^= 0x04
        try:
            loads(bytes(corrupted))
        except CacheError:
            rejected += 1
    rng = random.Random(11)
    sampled = 0
    for i in rng.sample(range(len(first)), 300):
        corrupted = bytearray(first)
        corrupted[i] = (corrupted[i] + rng.randint(1, 255)) % 256
        try:
            loads(bytes(corrupted))
        except CacheError:
            sampled += 1
    corruption = rejected == len(data) and sampled == 300
    ok = round_trip and warm and corruption
    verdict(11, ok, f"round trip of {len(first)} bytes identical {round_trip}; warm rerun recomputed "
                    f"{reloaded.computed} coefficients; corruption rejected at {rejected}/{len(data)} positions "
                    f"of a small file and {sampled}/300 random positions of the desk file")
    assert ok


# -- 12 -------------------------------------------------------------------------------------------

def test_criterion_12_pk_closed_forms(verdict):
    worst = mpmath.mpf(0)
    with mpmath.workprec(128):
        for k in range(0, 9):
            for x in asy.X_GRID:
                gap = abs(asy.pk_generating_sum(k, x, 60, 128) - asy.pk_closed_form(k, x, 128))
                worst = max(worst, gap)
    ok = worst < mpmath.mpf("1e-25")
    verdict(12, ok, f"k <= 8 on the grid {', '.join(str(v) for v in asy.X_GRID)}, truncation 60, "
                    f"128 bits: max gap {mpmath.nstr(worst, 3)}")
    assert ok
