from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from wpvol.qpi import (
    Interval,
    PiPoly,
    UndecidedComparison,
    bernoulli,
    compare,
    pi_interval,
    u,
    u_num,
    u_rational,
    zeta_even,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
pipolys = st.dictionaries(st.integers(0, 4), rationals, max_size=4).map(PiPoly)


# --- Bernoulli numbers, zeta values, u sequence ------------------------------

@pytest.mark.parametrize(
    "m, value",
    [(0, 1), (1, Fraction(-1, 2)), (2, Fraction(1, 6)), (3, 0), (4, Fraction(-1, 30)), (6, Fraction(1, 42)),
     (8, Fraction(-1, 30)), (10, Fraction(5, 66)), (12, Fraction(-691, 2730)), (20, Fraction(-174611, 330))],
)
def test_bernoulli_known_values(m, value):
    assert bernoulli(m) == value


@pytest.mark.parametrize("i", range(1, 16))
def test_zeta_even_against_mpmath(i):
    z = zeta_even(i)
    assert z.is_monomial() and z.degree() == i
    with mpmath.workdps(50):
        assert abs(z.to_mpf(200) - mpmath.zeta(2 * i)) < mpmath.mpf(10) ** -45


def test_u_first_values():
    assert u(0) == PiPoly(Fraction(1, 2))
    assert u(1) == PiPoly.monomial(Fraction(1, 12), 1)
    assert u(2) == PiPoly.monomial(Fraction(7, 720), 2)


@pytest.mark.parametrize("i", range(1, 20))
def test_u_matches_alternating_zeta(i):
    # u_i = zeta(2i)(1 - 2^(1-2i)) is the alternating zeta value eta(2i)
    with mpmath.workdps(90):
        ref = mpmath.altzeta(2 * i)
        assert u_num(i, 200).contains(ref)
        assert u_rational(i) * mpmath.pi ** (2 * i) == pytest.approx(float(ref), rel=1e-14)


# --- intervals ------------------------------------------------------------------

def test_pi_interval_encloses_pi():
    for prec in (64, 128, 512):
        enc = pi_interval(prec)
        with mpmath.workprec(prec + 64):
            assert enc.lo < mpmath.pi < enc.hi
        assert enc.width() < mpmath.mpf(2) ** (-prec + 4)


@given(rationals, rationals)
def test_interval_arithmetic_encloses_exact_results(a, b):
    A, B = Interval.from_rational(a, 64), Interval.from_rational(b, 64)
    for op in (lambda x, y: x + y, lambda x, y: x - y, lambda x, y: x * y):
        assert op(A, B).contains(op(a, b))
    if b != 0:
        enc = A / B
        assert enc.contains(a / b)


def test_interval_division_by_interval_containing_zero_fails():
    with pytest.raises(ZeroDivisionError):
        Interval.from_rational(1, 64) / Interval.from_rational(0, 64)


# --- the ring Q[pi^2] --------------------------------------------------------------

@given(pipolys, pipolys, pipolys)
def test_ring_laws(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + q == q + p and p * q == q * p
    assert p - p == PiPoly.zero()


@given(pipolys)
def test_cache_repr_round_trip(p):
    assert PiPoly.from_cache_repr(p.cache_repr()) == p


def test_string_forms():
    assert str(PiPoly({1: Fraction(1, 6)})) == "pi^2/6"
    assert str(PiPoly({0: 2, 1: 2})) == "2*pi^2 + 2"
    assert str(PiPoly(1)) == "1"
    assert PiPoly({0: 2, 1: 2}).cache_repr() == "0:2/1,1:2/1"


@given(pipolys)
def test_interval_evaluation_encloses_value(p):
    with mpmath.workprec(300):
        ref = sum((mpmath.mpf(c.numerator) / c.denominator * mpmath.pi ** (2 * d) for d, c in p.items()), mpmath.mpf(0))
    assert p.interval(128).contains(ref)


# --- comparison ---------------------------------------------------------------------

def test_compare_decides_close_values():
    # 22/7 - pi is about 1.3e-3; pi^2 against 9.8696044 is within 1e-8
    assert compare(PiPoly.monomial(1, 1), PiPoly(Fraction(98696044, 10 ** 7))) > 0
    assert compare(PiPoly.monomial(1, 1), PiPoly(Fraction(98696045, 10 ** 7))) < 0
    assert compare(u(1), PiPoly(Fraction(822467, 10 ** 6))) > 0


def test_compare_equal_exactly():
    assert compare(PiPoly({0: 1, 1: 2}), PiPoly({1: 2, 0: 1})) == 0


@given(pipolys, pipolys)
def test_compare_antisymmetric(p, q):
    assert compare(p, q) == -compare(q, p)


@given(pipolys, pipolys, pipolys)
def test_compare_transitive(p, q, r):
    assume(compare(p, q) <= 0 and compare(q, r) <= 0)
    assert compare(p, r) <= 0


def test_compare_precision_ceiling():
    # pi^2 and a rational within 2^-100 of it cannot be told apart at 64 bits
    enc = pi_interval(400) ** 2
    man, exp = enc.mid().man_exp
    close = PiPoly(Fraction(man) * Fraction(2) ** exp)
    with pytest.raises(UndecidedComparison):
        compare(PiPoly.monomial(1, 1), close, ceiling=64)
    assert compare(PiPoly.monomial(1, 1), close) != 0
