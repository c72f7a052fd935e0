"""Exact arithmetic over Q[pi^2] with validated numeric enclosures.

Every exact quantity in the package (volume coefficients, zeta values, the
recursion weights ``u_i``) is an element of Q[pi^2].  This module provides

* :class:`PiPoly`, an immutable finite sum ``sum_d r_d * pi^(2d)`` with
  :class:`fractions.Fraction` coefficients;
* :class:`Interval`, outward-rounded binary floating point intervals used to
  decide signs and orderings of ``PiPoly`` values;
* exact Bernoulli numbers, even zeta values and the weights ``u_i``.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import cmp_to_key
from math import comb, factorial
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Union

import mpmath
from mpmath import libmp

__all__ = [
    "Rational",
    "PiPoly",
    "Interval",
    "UndecidedComparison",
    "bernoulli",
    "zeta_even",
    "u",
    "u_rational",
    "u_num",
    "pi_interval",
    "compare",
    "DEFAULT_PRECISION_CEILING",
]

Rational = Fraction

DEFAULT_PRECISION_CEILING = 4096

Scalar = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------

# orders raw mpf tuples without rounding them to the ambient precision
_exact_order = cmp_to_key(libmp.mpf_cmp)

class Interval:
    """Closed interval ``[lo, hi]`` with binary floating point endpoints.

    Arithmetic is rounded outward at the working precision ``prec`` (bits), so
    the result always contains every value obtainable from points of the
    operands.  Endpoints are exposed as :class:`mpmath.mpf`.
    """

    __slots__ = ("_lo", "_hi", "prec")

    def __init__(self, lo, hi, prec: int):
        lo = lo._mpf_ if isinstance(lo, mpmath.mpf) else lo
        hi = hi._mpf_ if isinstance(hi, mpmath.mpf) else hi
        if libmp.mpf_gt(lo, hi):
            raise ValueError("interval lower bound exceeds upper bound")
        self._lo = lo
        self._hi = hi
        self.prec = prec

    # construction -----------------------------------------------------
    @classmethod
    def from_rational(cls, value: Scalar, prec: int) -> "Interval":
        q = _as_fraction(value)
        lo = libmp.from_rational(q.numerator, q.denominator, prec, libmp.round_floor)
        hi = libmp.from_rational(q.numerator, q.denominator, prec, libmp.round_ceiling)
        return cls(lo, hi, prec)

    @classmethod
    def point(cls, value, prec: int) -> "Interval":
        """Interval around a real given as int, Fraction, float, mpf or mpmath constant.

        Floats and mpf values are exact binary numbers.  Anything else (for
        example ``mpmath.pi``) is evaluated with extra bits and widened by one
        unit in the last place of that evaluation on each side.
        """
        if isinstance(value, (int, Fraction)):
            return cls.from_rational(value, prec)
        if isinstance(value, (float, mpmath.mpf)):
            v = mpmath.mpf(value)._mpf_ if isinstance(value, float) else value._mpf_
            lo = libmp.mpf_pos(v, prec, libmp.round_floor)
            hi = libmp.mpf_pos(v, prec, libmp.round_ceiling)
            return cls(lo, hi, prec)
        extra = prec + 20
        with mpmath.workprec(extra):
            v = mpmath.mpf(value)
            ulp = abs(v) * mpmath.ldexp(1, -(extra - 2)) + mpmath.ldexp(1, -4 * extra)
            lo = libmp.mpf_sub(v._mpf_, ulp._mpf_, prec, libmp.round_floor)
            hi = libmp.mpf_add(v._mpf_, ulp._mpf_, prec, libmp.round_ceiling)
        return cls(lo, hi, prec)

    # accessors --------------------------------------------------------
    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._lo)

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._hi)

    def width(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(libmp.mpf_sub(self._hi, self._lo, self.prec + 8, libmp.round_ceiling))

    def mid(self) -> mpmath.mpf:
        s = libmp.mpf_add(self._lo, self._hi, self.prec + 8, libmp.round_nearest)
        return mpmath.mp.make_mpf(libmp.mpf_shift(s, -1))

    def contains(self, value) -> bool:
        if isinstance(value, Fraction):
            inner = Interval.from_rational(value, self.prec + 64)
            return not (libmp.mpf_lt(inner._hi, self._lo) or libmp.mpf_gt(inner._lo, self._hi))
        # an mpf keeps its own precision; other reals are converted exactly where possible
        v = value._mpf_ if isinstance(value, mpmath.mpf) else mpmath.mpf(value)._mpf_
        return libmp.mpf_le(self._lo, v) and libmp.mpf_le(v, self._hi)

    def is_positive(self) -> bool:
        return libmp.mpf_gt(self._lo, libmp.fzero)

    def is_negative(self) -> bool:
        return libmp.mpf_lt(self._hi, libmp.fzero)

    def __lt__(self, other: "Interval") -> bool:
        """Certainly less: every point of ``self`` is below every point of ``other``."""
        return libmp.mpf_lt(self._hi, other._lo)

    def __gt__(self, other: "Interval") -> bool:
        return libmp.mpf_gt(self._lo, other._hi)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.point(other, self.prec)

    def __add__(self, other) -> "Interval":
        other = self._coerce(other)
        p = min(self.prec, other.prec)
        return Interval(
            libmp.mpf_add(self._lo, other._lo, p, libmp.round_floor),
            libmp.mpf_add(self._hi, other._hi, p, libmp.round_ceiling),
            p,
        )

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(libmp.mpf_neg(self._hi), libmp.mpf_neg(self._lo), self.prec)

    def __sub__(self, other) -> "Interval":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        other = self._coerce(other)
        p = min(self.prec, other.prec)
        pairs = [(a, b) for a in (self._lo, self._hi) for b in (other._lo, other._hi)]
        lo = min((libmp.mpf_mul(a, b, p, libmp.round_floor) for a, b in pairs), key=_exact_order)
        hi = max((libmp.mpf_mul(a, b, p, libmp.round_ceiling) for a, b in pairs), key=_exact_order)
        return Interval(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = self._coerce(other)
        if not (other.is_positive() or other.is_negative()):
            raise ZeroDivisionError("interval divisor contains zero")
        p = min(self.prec, other.prec)
        pairs = [(a, b) for a in (self._lo, self._hi) for b in (other._lo, other._hi)]
        lo = min((libmp.mpf_div(a, b, p, libmp.round_floor) for a, b in pairs), key=_exact_order)
        hi = max((libmp.mpf_div(a, b, p, libmp.round_ceiling) for a, b in pairs), key=_exact_order)
        return Interval(lo, hi, p)

    def __pow__(self, k: int) -> "Interval":
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = Interval.from_rational(1, self.prec)
        base = self
        # only used for non-negative bases (powers of pi^2); general case via repeated products
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __repr__(self) -> str:
        return f"Interval([{mpmath.nstr(self.lo, 20)}, {mpmath.nstr(self.hi, 20)}], prec={self.prec})"


def pi_interval(prec: int) -> Interval:
    """Enclosure of pi of width below ``2**(1 - prec)``."""
    # pi lies in [2, 4): a (prec+2)-bit mantissa puts the ulp at 2**(-prec)
    p = prec + 2
    return Interval(libmp.mpf_pi(p, libmp.round_floor), libmp.mpf_pi(p, libmp.round_ceiling), p)


# ---------------------------------------------------------------------------
# PiPoly
# ---------------------------------------------------------------------------

class PiPoly:
    """An element ``sum_d r_d * pi^(2d)`` of Q[pi^2].

    Instances are immutable and hashable.  Zero coefficients are never stored;
    the zero element has no terms.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[int, Scalar], Iterable, Scalar, None] = None):
        clean: dict[int, Fraction] = {}
        if terms is None:
            pass
        elif isinstance(terms, (int, Fraction)):
            q = Fraction(terms)
            if q:
                clean[0] = q
        else:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for d, r in items:
                if d < 0:
                    raise ValueError("pi^2 exponents must be non-negative")
                q = _as_fraction(r)
                if q:
                    clean[int(d)] = clean.get(int(d), Fraction(0)) + q
                    if not clean[int(d)]:
                        del clean[int(d)]
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def monomial(cls, coeff: Scalar, degree: int) -> "PiPoly":
        return cls({degree: coeff})

    @classmethod
    def zero(cls) -> "PiPoly":
        return cls()

    @classmethod
    def one(cls) -> "PiPoly":
        return cls({0: 1})

    # inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        """Copy of the exponent -> coefficient map (ascending exponents)."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, degree: int) -> Fraction:
        return self._terms.get(degree, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> int:
        """Largest pi^2 exponent; -1 for the zero element."""
        return max(self._terms) if self._terms else -1

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    # arithmetic -------------------------------------------------------
    @staticmethod
    def _lift(other) -> "PiPoly":
        if isinstance(other, PiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return PiPoly(other)
        return NotImplemented

    def __add__(self, other) -> "PiPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for d, r in other._terms.items():
            out[d] = out.get(d, Fraction(0)) + r
        return PiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "PiPoly":
        return PiPoly({d: -r for d, r in self._terms.items()})

    def __sub__(self, other) -> "PiPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "PiPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "PiPoly":
        if isinstance(other, (int, Fraction)):
            return PiPoly({d: r * other for d, r in self._terms.items()})
        if not isinstance(other, PiPoly):
            return NotImplemented
        out: dict[int, Fraction] = {}
        for d1, r1 in self._terms.items():
            for d2, r2 in other._terms.items():
                out[d1 + d2] = out.get(d1 + d2, Fraction(0)) + r1 * r2
        return PiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PiPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of PiPoly by zero")
            return PiPoly({d: r / other for d, r in self._terms.items()})
        return NotImplemented

    def shift(self, k: int) -> "PiPoly":
        """Multiply by ``pi^(2k)``."""
        return PiPoly({d + k: r for d, r in self._terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = PiPoly(other)
        if not isinstance(other, PiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # numerics ---------------------------------------------------------
    def interval(self, prec: int = 128) -> Interval:
        """Validated enclosure of the represented real number."""
        work = prec + 16 + 4 * max(self.degree(), 0).bit_length()
        total = Interval.from_rational(0, work)
        if not self._terms:
            return total
        pi2 = pi_interval(work) ** 2
        power = Interval.from_rational(1, work)
        last = 0
        for d, r in self._terms.items():
            power = power * (pi2 ** (d - last))
            last = d
            total = total + Interval.from_rational(r, work) * power
        return total

    def to_mpf(self, prec: int = 128) -> mpmath.mpf:
        return self.interval(prec).mid()

    def __float__(self) -> float:
        return float(self.to_mpf(64))

    # formatting -------------------------------------------------------
    def cache_repr(self) -> str:
        """``d1:p1/q1,d2:p2/q2`` with ascending exponents (cache file syntax)."""
        return ",".join(f"{d}:{r.numerator}/{r.denominator}" for d, r in self._terms.items())

    @classmethod
    def from_cache_repr(cls, text: str) -> "PiPoly":
        terms = {}
        text = text.strip()
        if not text:
            return cls()
        last = -1
        for chunk in text.split(","):
            d_txt, sep, q_txt = chunk.partition(":")
            p_txt, slash, den_txt = q_txt.partition("/")
            if not sep or not slash:
                raise ValueError(f"malformed term {chunk!r}")
            d, p, q = int(d_txt), int(p_txt), int(den_txt)
            if q <= 0:
                raise ValueError(f"non-positive denominator in {chunk!r}")
            r = Fraction(p, q)
            if r.numerator != p or r.denominator != q or p == 0:
                raise ValueError(f"rational not in lowest terms or zero in {chunk!r}")
            if d <= last:
                raise ValueError(f"exponents not strictly ascending in {text!r}")
            last = d
            terms[d] = r
        return cls(terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for d in sorted(self._terms, reverse=True):
            r = self._terms[d]
            sign = "-" if r < 0 else "+"
            a = abs(r)
            if d == 0:
                body = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
            else:
                pw = "pi^2" if d == 1 else f"pi^{2 * d}"
                num = pw if a.numerator == 1 else f"{a.numerator}*{pw}"
                body = num if a.denominator == 1 else f"{num}/{a.denominator}"
            pieces.append((sign, body))
        head_sign, head = pieces[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"PiPoly({str(self)!r})"


# ---------------------------------------------------------------------------
# Bernoulli numbers, zeta(2i), u_i
# ---------------------------------------------------------------------------

_bern_lock = threading.Lock()
_bern_cache: list[Fraction] = [Fraction(1)]


def bernoulli(m: int) -> Fraction:
    """Bernoulli number ``B_m`` with ``B_1 = -1/2``.

    Computed from ``sum_{k<=m} C(m+1, k) B_k = 0`` and cached.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m < len(_bern_cache):
        return _bern_cache[m]
    with _bern_lock:
        while len(_bern_cache) <= m:
            j = len(_bern_cache)
            if j >= 3 and j % 2 == 1:
                _bern_cache.append(Fraction(0))
                continue
            s = sum((comb(j + 1, k) * _bern_cache[k] for k in range(j)), Fraction(0))
            _bern_cache.append(-s / (j + 1))
    return _bern_cache[m]


def zeta_even(i: int) -> PiPoly:
    """``zeta(2i)`` as the exact monomial ``(-1)^(i+1) B_2i (2 pi)^2i / (2 (2i)!)``."""
    if i < 1:
        raise ValueError("zeta_even needs i >= 1")
    r = (-1) ** (i + 1) * bernoulli(2 * i) * Fraction(2 ** (2 * i), 2 * factorial(2 * i))
    return PiPoly.monomial(r, i)


_u_lock = threading.Lock()
_u_cache: dict[int, Fraction] = {0: Fraction(1, 2)}


def u_rational(i: int) -> Fraction:
    """Rational part ``q_i`` of ``u_i = q_i * pi^(2i)``."""
    if i < 0:
        raise ValueError("u is indexed by i >= 0")
    try:
        return _u_cache[i]
    except KeyError:
        pass
    q = zeta_even(i).coeff(i) * (1 - Fraction(2, 4 ** i))
    with _u_lock:
        _u_cache.setdefault(i, q)
    return _u_cache[i]


def u(i: int) -> PiPoly:
    """Recursion weight: ``u_0 = 1/2`` and ``u_i = zeta(2i) (1 - 2^(1-2i))``."""
    return PiPoly.monomial(u_rational(i), i)


def u_num(i: int, precision: int = 128) -> Interval:
    return u(i).interval(precision)


# ---------------------------------------------------------------------------
# ordering
# ---------------------------------------------------------------------------

class UndecidedComparison(ArithmeticError):
    """Two distinct values could not be separated below the precision ceiling."""

    def __init__(self, precision: int):
        super().__init__(f"undecided at precision {precision}")
        self.precision = precision


def compare(a, b, ceiling: int = DEFAULT_PRECISION_CEILING, start: int = 64) -> int:
    """Return -1, 0 or 1 as ``a < b``, ``a == b`` or ``a > b``.

    Equality is decided on the exact representation; strict order by interval
    evaluation of ``a - b`` with precision doubling up to ``ceiling`` bits.
    """
    diff = PiPoly._lift(a) - PiPoly._lift(b)
    if diff.is_zero():
        return 0
    prec = start
    while True:
        enc = diff.interval(prec)
        if enc.is_positive():
            return 1
        if enc.is_negative():
            return -1
        if prec >= ceiling:
            raise UndecidedComparison(prec)
        prec = min(2 * prec, ceiling)
