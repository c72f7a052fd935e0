"""Discrete calculus on functions of multi-indices.

Functions ``f : N_0^n -> R`` are wrapped in :class:`GridFunction`; values may
be any exact ring element supporting ``+``, ``-`` and multiplication by
integers and fractions (``Fraction`` or :class:`~wpvol.qpi.PiPoly`).

The forward difference in coordinate ``i`` is ``delta_i f(alpha) = f(alpha) -
f(alpha + e_i)`` (note the sign), and ``delta^m`` is the iterated mixed
difference.  The module provides

* exact differences and the two unconditional identities used to integrate
  them (telescoping, and differences of anti-diagonal sums);
* discrete Taylor polynomials, both plain and shifted to a threshold ``a``;
* :func:`build_FN`, which resums a shifted Taylor approximation of the volume
  coefficients into an explicit combination of powers, ``cosh`` and ``sinhc``;
* :func:`derivative_bound_stat`, a measured sup statistic of normalized
  differences of the volume coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

import mpmath
from mpmath import mp

from .asymptotics import (
    DEFAULT_PRECISION,
    TrendReport,
    _mpf,
    jap,
    normalized_residual,
    p_k,
    sinhc,
    volume_ratio,
    weight,
)
from .qpi import PiPoly
from .recursion import Signature, _sig, coeff, ensure, is_stable, vgn
from .store import CoeffTable

__all__ = [
    "GridFunction",
    "delta",
    "delta_step",
    "discrete_integral_identity",
    "conv_derivative_identity",
    "BinomialPoly",
    "taylor_poly",
    "newton_poly",
    "ShiftedPoly",
    "shifted_taylor",
    "Approximant",
    "build_FN",
    "RN",
    "DerivativeReport",
    "derivative_bound_stat",
]


# ---------------------------------------------------------------------------
# grid functions and differences
# ---------------------------------------------------------------------------

class GridFunction:
    """A total function on ``N_0^n`` with memoized exact values."""

    def __init__(self, arity: int, func: Callable[[tuple[int, ...]], object], name: str = "f"):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        self.arity = arity
        self._func = func
        self._cache: dict[tuple[int, ...], object] = {}
        self.name = name

    def __call__(self, alpha: Sequence[int]):
        alpha = tuple(alpha)
        if len(alpha) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} indices, got {len(alpha)}")
        try:
            return self._cache[alpha]
        except KeyError:
            value = self._cache[alpha] = self._func(alpha)
            return value

    @classmethod
    def from_coefficients(cls, sig, table: CoeffTable) -> "GridFunction":
        """``alpha -> c_{g,n}(alpha)``, zero beyond the degree bound."""
        s = _sig(sig)
        ensure(s, table)
        return cls(s.n, lambda alpha: coeff(s, alpha, table), name=f"c_{s.g},{s.n}")

    @classmethod
    def from_values(cls, arity: int, values: Mapping[tuple[int, ...], object], default=0) -> "GridFunction":
        """Finitely supported function given by a dictionary."""
        return cls(arity, lambda alpha: values.get(alpha, default), name="table")

    def shifted(self, i: int) -> "GridFunction":
        """``delta_i f`` as a new grid function."""
        if not 0 <= i < self.arity:
            raise ValueError(f"coordinate {i} out of range")

        def diff(alpha):
            nxt = alpha[:i] + (alpha[i] + 1,) + alpha[i + 1 :]
            return self(alpha) - self(nxt)

        return GridFunction(self.arity, diff, name=f"d{i}{self.name}")


def delta(f: GridFunction, m: Sequence[int], alpha: Sequence[int]):
    """``delta^m f(alpha)`` by inclusion-exclusion over the box ``0 <= beta <= m``."""
    m, alpha = tuple(m), tuple(alpha)
    if len(m) != f.arity or len(alpha) != f.arity:
        raise ValueError("arity mismatch")
    if any(v < 0 for v in m):
        raise ValueError("difference orders must be non-negative")
    total = 0
    for beta in product(*(range(k + 1) for k in m)):
        w = 1
        for k, b in zip(m, beta):
            w *= comb(k, b)
        if sum(beta) % 2:
            w = -w
        total = total + f(tuple(a + b for a, b in zip(alpha, beta))) * w
    return total


def delta_step(f: GridFunction, m: Sequence[int], alpha: Sequence[int]):
    """``delta^m f(alpha)`` by repeated single-coordinate differences."""
    g = f
    for i, k in enumerate(m):
        for _ in range(k):
            g = g.shifted(i)
    return g(alpha)


def discrete_integral_identity(f: GridFunction, alpha: Sequence[int]):
    """Both sides of the telescoping formula

    ``f(alpha) = f(0) - sum_i sum_{k < alpha_i} delta_i f(0, .., 0, k, alpha_{i+1}, .., alpha_n)``.
    """
    alpha = tuple(alpha)
    n = f.arity
    if len(alpha) != n:
        raise ValueError("arity mismatch")
    rhs = f((0,) * n)
    for i in range(n):
        e_i = tuple(int(j == i) for j in range(n))
        for k in range(alpha[i]):
            point = (0,) * i + (k,) + alpha[i + 1 :]
            rhs = rhs - delta(f, e_i, point)
    return f(alpha), rhs


def _two_index(c) -> Callable[[int, int], object]:
    if callable(c):
        return c
    return lambda k1, k2: c.get((k1, k2), 0)


def _delta2(c, m1: int, m2: int, k1: int, k2: int):
    """``delta_1^m1 delta_2^m2 c`` at ``(k1, k2)``."""
    total = 0
    for b1 in range(m1 + 1):
        for b2 in range(m2 + 1):
            w = comb(m1, b1) * comb(m2, b2) * (-1) ** (b1 + b2)
            total = total + c(k1 + b1, k2 + b2) * w
    return total


def conv_derivative_identity(c, m: int, k: int):
    """Both sides of the difference formula for anti-diagonal sums.

    With ``v_k = sum_{k1+k2=k} c[k1, k2]``, the left side is ``delta^m v_k``
    and the right side splits the anti-diagonal at ``k1 >= k2`` / ``k1 < k2``
    and subtracts a boundary correction at ``(floor((k+1)/2), floor(k/2)+1)``.
    ``c`` is a mapping ``(k1, k2) -> value`` (missing keys are zero) or a
    callable of two indices.
    """
    if m < 1 or k < 0:
        raise ValueError("need m >= 1 and k >= 0")
    cf = _two_index(c)

    def v(t):
        total = 0
        for k1 in range(t + 1):
            total = total + cf(k1, t - k1)
        return total

    lhs = 0
    for j in range(m + 1):
        lhs = lhs + v(k + j) * (comb(m, j) * (-1) ** j)

    rhs = 0
    for k1 in range(k + 1):
        k2 = k - k1
        if k1 >= k2:
            rhs = rhs + _delta2(cf, m, 0, k1, k2)
        else:
            rhs = rhs + _delta2(cf, 0, m, k1, k2)
    p, q = (k + 1) // 2, k // 2 + 1
    for m1 in range(m):
        rhs = rhs - _delta2(cf, m1, m - 1 - m1, p, q)
    return lhs, rhs


# ---------------------------------------------------------------------------
# polynomials in the binomial basis
# ---------------------------------------------------------------------------

def _binom(x: int, k: int) -> Fraction:
    """Generalized binomial coefficient ``x (x-1) ... (x-k+1) / k!`` for any integer ``x``."""
    out = 1
    for j in range(k):
        out *= x - j
    return Fraction(out, factorial(k))


def _poly_mul(p: list, q: list) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _binomial_in_powers(m: int, shift: int = 0) -> list[Fraction]:
    """Power-basis coefficients of ``X -> C(X - shift, m)``."""
    out = [Fraction(1)]
    for j in range(m):
        out = _poly_mul(out, [Fraction(-shift - j), Fraction(1)])
    return [c / factorial(m) for c in out]


def _pk_in_powers(k: int) -> list[Fraction]:
    out = [Fraction(1)]
    for j in range(k):
        out = _poly_mul(out, [Fraction(1 - j), Fraction(2)])
    return out


def _powers_to_pk(coeffs: list[Fraction]) -> dict[int, Fraction]:
    """Rewrite a power-basis polynomial in the basis ``p_k`` (triangular, leading coefficient ``2^k``)."""
    rest = list(coeffs)
    out: dict[int, Fraction] = {}
    for k in range(len(rest) - 1, -1, -1):
        if not rest[k]:
            continue
        lam = rest[k] / 2 ** k
        out[k] = lam
        for j, c in enumerate(_pk_in_powers(k)):
            rest[j] -= lam * c
    return out


class BinomialPoly:
    """Polynomial ``sum_m a_m prod_j C(alpha_j, m_j)`` in ``n`` variables.

    The binomial basis is the natural output of discrete Taylor expansion:
    the coefficient of ``C(alpha, m)`` is the ``m``-th forward difference at 0.
    """

    def __init__(self, arity: int, coeffs: Mapping[tuple[int, ...], object]):
        self.arity = arity
        self.coeffs = {m: v for m, v in coeffs.items() if v != 0}

    def __call__(self, alpha: Sequence[int]):
        alpha = tuple(alpha)
        if len(alpha) != self.arity:
            raise ValueError("arity mismatch")
        total = 0
        for m, v in self.coeffs.items():
            w = Fraction(1)
            for a, k in zip(alpha, m):
                w *= _binom(a, k)
                if not w:
                    break
            if w:
                total = total + v * w
        return total

    def degree(self) -> int:
        return max((sum(m) for m in self.coeffs), default=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinomialPoly):
            return NotImplemented
        return self.arity == other.arity and self.coeffs == other.coeffs

    def to_powers(self) -> dict[tuple[int, ...], object]:
        """Coefficients in the monomial basis ``prod_j alpha_j^e_j``."""
        out: dict[tuple[int, ...], object] = {}
        for m, v in self.coeffs.items():
            rows = [_binomial_in_powers(k) for k in m]
            for e in product(*(range(len(r)) for r in rows)):
                w = Fraction(1)
                for r, j in zip(rows, e):
                    w *= r[j]
                if w:
                    out[e] = out.get(e, 0) + v * w
        return {e: v for e, v in out.items() if v != 0}

    def __repr__(self) -> str:
        return f"BinomialPoly(arity={self.arity}, terms={len(self.coeffs)}, degree={self.degree()})"


def taylor_poly(f: GridFunction, K: int) -> BinomialPoly:
    """Discrete Taylor polynomial of degree ``<= K`` at the origin.

    Built recursively from the integration formula: the degree-``K``
    polynomial is ``f(0)`` minus the telescoped sums of the degree-``(K-1)``
    polynomials of the first differences ``delta_i f``.  In the binomial
    basis, summing ``C(k, j)`` over ``k < alpha_i`` gives ``C(alpha_i, j+1)``
    and substituting 0 in the earlier coordinates keeps only terms whose
    earlier exponents vanish.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    n = f.arity
    memo: dict[tuple[int, ...], dict] = {}

    def expand(orders: tuple[int, ...], depth: int) -> dict:
        # Taylor polynomial of delta^orders f of degree `depth`
        key = orders + (depth,)
        if key in memo:
            return memo[key]
        out = {(0,) * n: delta(f, orders, (0,) * n)}
        if depth > 0:
            for i in range(n):
                bumped = orders[:i] + (orders[i] + 1,) + orders[i + 1 :]
                for m, v in expand(bumped, depth - 1).items():
                    if any(m[:i]):
                        continue
                    raised = m[:i] + (m[i] + 1,) + m[i + 1 :]
                    out[raised] = out.get(raised, 0) - v
        memo[key] = out
        return out

    return BinomialPoly(n, expand((0,) * n, K))


def newton_poly(f: GridFunction, K: int) -> BinomialPoly:
    """Newton interpolation ``sum_{|m|<=K} (-1)^|m| delta^m f(0) C(alpha, m)``."""
    n = f.arity
    coeffs = {}
    for m in product(range(K + 1), repeat=n):
        if sum(m) <= K:
            v = delta(f, m, (0,) * n)
            coeffs[m] = -v if sum(m) % 2 else v
    return BinomialPoly(n, coeffs)


# ---------------------------------------------------------------------------
# shifted expansion
# ---------------------------------------------------------------------------

Region = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass
class ShiftedPoly:
    """Element of the class of functions polynomial in each variable past ``a``.

    ``regions[(I, beta)]`` is a polynomial in the shifted variables
    ``alpha_i - a`` for ``i`` in ``I`` (0-based, increasing), valid on the set
    where ``alpha_i >= a`` for ``i`` in ``I`` and ``alpha`` equals ``beta`` on
    the other coordinates (``beta`` entries below ``a``).  The regions
    partition ``N_0^n``.
    """

    arity: int
    K: int
    a: int
    regions: dict[Region, BinomialPoly] = field(default_factory=dict)

    @staticmethod
    def region_of(alpha: Sequence[int], a: int) -> Region:
        I = tuple(i for i, v in enumerate(alpha) if v >= a)
        beta = tuple(v for v in alpha if v < a)
        return I, beta

    def __call__(self, alpha: Sequence[int]):
        alpha = tuple(alpha)
        if len(alpha) != self.arity:
            raise ValueError("arity mismatch")
        I, beta = self.region_of(alpha, self.a)
        return self.regions[(I, beta)](tuple(alpha[i] - self.a for i in I))

    def check_partition(self) -> bool:
        """Every expected region is present exactly once."""
        expected = set()
        for r in range(self.arity + 1):
            for I in combinations(range(self.arity), r):
                for beta in product(range(self.a), repeat=self.arity - r):
                    expected.add((I, beta))
        return expected == set(self.regions)


def _embed(I: tuple[int, ...], beta: tuple[int, ...], hat: tuple[int, ...], a: int, n: int) -> tuple[int, ...]:
    out, it_hat, it_beta = [], iter(hat), iter(beta)
    for i in range(n):
        out.append(next(it_hat) + a if i in I else next(it_beta))
    return tuple(out)


def shifted_taylor(f: GridFunction, K: int, a: int) -> ShiftedPoly:
    """Shifted discrete Taylor approximation of ``f`` of degree ``K`` past ``a``.

    On each region the restriction ``hat -> f(alpha_I = hat + a, alpha_rest = beta)``
    is replaced by its plain Taylor polynomial at the origin.  With ``a = 0``
    there is a single region and the result is :func:`taylor_poly`.
    """
    if K < 0 or a < 0:
        raise ValueError("K and a must be non-negative")
    n = f.arity
    out = ShiftedPoly(n, K, a)
    for r in range(n, -1, -1):
        for I in combinations(range(n), r):
            for beta in product(range(a), repeat=n - r):
                restricted = GridFunction(
                    r, lambda hat, I=I, beta=beta: f(_embed(I, beta, hat, a, n)), name=f"{f.name}|{I},{beta}"
                )
                out.regions[(I, beta)] = taylor_poly(restricted, K)
    return out


# ---------------------------------------------------------------------------
# resummation into cosh / sinhc form
# ---------------------------------------------------------------------------

PLUS, MINUS, NONE = "cosh", "sinhc", "poly"


@dataclass(frozen=True)
class _Factor:
    scale: Fraction
    exponent: int
    kind: str


def _closed_factor(k: int) -> _Factor:
    # sum over all alpha of p_k(alpha) w_alpha(x)
    if k % 2 == 0:
        return _Factor(Fraction(1, 2 ** k), k, MINUS)
    return _Factor(Fraction(1, 2 ** (k - 1)), k - 1, PLUS)


def _point_factor(b: int, scale=Fraction(1)) -> _Factor:
    return _Factor(Fraction(scale) / (4 ** b * factorial(2 * b + 1)), 2 * b, NONE)


def _tail_factors(k: int, a: int) -> list[_Factor]:
    """``sum_{alpha >= a} p_k(alpha) w_alpha(x)`` as the full sum minus the first ``a`` terms."""
    out = [_closed_factor(k)]
    for b in range(a):
        v = p_k(k, b)
        if v:
            out.append(_point_factor(b, -v))
    return out


TermKey = tuple[tuple[int, ...], frozenset, frozenset]


@dataclass
class Approximant:
    """``sum_t coef_t / V * prod_i x_i^(m_i) * prod_{I+} cosh(x_i/2) * prod_{I-} sinhc(x_i/2)``.

    ``terms`` maps ``(m, I+, I-)`` to an exact numerator in Q[pi^2]; the
    common denominator is ``volume`` (``V_{g,n}``).  Exponents are even and
    the two index sets are disjoint.
    """

    signature: Signature
    order: int
    a: int
    volume: PiPoly
    terms: dict[TermKey, PiPoly]
    _numeric: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, x: Sequence, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
        x = tuple(x)
        if len(x) != self.signature.n:
            raise ValueError("length vector has the wrong size")
        with mp.workprec(precision + 16):
            coeffs = self._coefficients(precision + 16)
            xs = [_mpf(v) for v in x]
            ch = [mpmath.cosh(v / 2) for v in xs]
            sh = [sinhc(v / 2, precision + 16) for v in xs]
            total = mpmath.mpf(0)
            for (m, plus, minus), c in coeffs:
                term = c
                for i, e in enumerate(m):
                    if e:
                        term *= xs[i] ** e
                for i in plus:
                    term *= ch[i]
                for i in minus:
                    term *= sh[i]
                total += term
        with mp.workprec(precision):
            return +total

    def _coefficients(self, precision: int) -> list:
        cached = self._numeric.get(precision)
        if cached is None:
            vol = self.volume.interval(precision)
            cached = [(key, (num.interval(precision) / vol).mid()) for key, num in sorted(self.terms.items(), key=_term_order)]
            self._numeric[precision] = cached
        return cached

    def numerator_at_zero(self) -> PiPoly:
        """Exact numerator at ``x = 0``; only terms without powers of ``x`` survive."""
        return sum((c for (m, _, _), c in self.terms.items() if not any(m)), PiPoly.zero())

    def is_one_at_zero(self) -> bool:
        return self.numerator_at_zero() == self.volume

    def hyperbolic_degree(self) -> int:
        """Largest total power of ``x`` carried by variables with a cosh or sinhc factor."""
        best = 0
        for m, plus, minus in self.terms:
            best = max(best, sum(m[i] for i in plus | minus))
        return best

    def truncated_series(self, x: Sequence[Fraction], shifted: ShiftedPoly, truncation: int) -> PiPoly:
        """``sum_{|alpha|_inf <= T} c~(alpha) w_alpha(x)`` exactly (test oracle, numerator only)."""
        total = PiPoly.zero()
        for alpha in product(range(truncation + 1), repeat=self.signature.n):
            w = Fraction(1)
            for v, b in zip(x, alpha):
                w *= weight(b, Fraction(v))
            if w:
                total = total + shifted(alpha) * w
        return total


def _term_order(item):
    (m, plus, minus), _ = item
    return (m, sorted(plus), sorted(minus))


def build_FN(sig, N: int, a: Optional[int] = None, table: Optional[CoeffTable] = None) -> Approximant:
    """Explicit ``N``-th order approximant of ``V_{g,n}(x) / V_{g,n}``.

    The coefficients are approximated by :func:`shifted_taylor` with degree
    ``2N`` and threshold ``a`` (default ``2N + 2``); each regional polynomial
    is rewritten in the ``p_k`` basis and summed against the normalized
    monomials in closed form.
    """
    if table is None:
        raise ValueError("a coefficient table is required")
    s = _sig(sig)
    if N < 0:
        raise ValueError("N must be non-negative")
    if a is None:
        a = 2 * N + 2
    f = GridFunction.from_coefficients(s, table)
    shifted = shifted_taylor(f, 2 * N, a)
    return _resum(s, N, a, shifted, vgn(s, table))


def _resum(s: Signature, N: int, a: int, shifted: ShiftedPoly, volume: PiPoly) -> Approximant:
    n = s.n
    terms: dict[TermKey, PiPoly] = {}
    pk_cache: dict[int, dict[int, Fraction]] = {}

    def binomial_to_pk(k: int) -> dict[int, Fraction]:
        # C(alpha - a, k) in the p_j(alpha) basis
        if k not in pk_cache:
            pk_cache[k] = _powers_to_pk(_binomial_in_powers(k, a))
        return pk_cache[k]

    for (I, beta), poly in shifted.regions.items():
        rest = [i for i in range(n) if i not in I]
        fixed = [_point_factor(b) for b in beta]
        for m, value in poly.coeffs.items():
            # per variable in I: list of (p_k weight, factor) choices
            choices = []
            for k in m:
                opts = []
                for j, lam in binomial_to_pk(k).items():
                    for fac in _tail_factors(j, a):
                        opts.append(_Factor(lam * fac.scale, fac.exponent, fac.kind))
                choices.append(opts)
            for combo in product(*choices):
                exps = [0] * n
                plus, minus = set(), set()
                scale = Fraction(1)
                for i, fac in zip(I, combo):
                    scale *= fac.scale
                    exps[i] = fac.exponent
                    if fac.kind == PLUS:
                        plus.add(i)
                    elif fac.kind == MINUS:
                        minus.add(i)
                for i, fac in zip(rest, fixed):
                    scale *= fac.scale
                    exps[i] = fac.exponent
                if not scale:
                    continue
                key = (tuple(exps), frozenset(plus), frozenset(minus))
                contribution = value * scale
                old = terms.get(key)
                terms[key] = contribution if old is None else old + contribution
    terms = {k: v for k, v in terms.items() if v != 0}
    return Approximant(s, N, a, volume, terms)


def RN(sig, x: Sequence, approx: Approximant, table: CoeffTable, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Normalized residual of ``approx`` at ``x``: ``jap(g)^(N+1) / (jap(x)^(3N+1) e^(|x|/2))``."""
    s = _sig(sig)
    with mp.workprec(precision):
        ratio = volume_ratio(s, x, table, precision).mid()
        return normalized_residual(ratio, approx(x, precision), s.g, x, approx.order)


# ---------------------------------------------------------------------------
# derivative bound statistic
# ---------------------------------------------------------------------------

def _orders(n: int, sizes: Iterable[int]) -> Iterator[tuple[int, ...]]:
    for size in sizes:
        if size < 0:
            continue
        for m in product(range(size + 1), repeat=n):
            if sum(m) == size:
                yield m


def _box(n: int, limit: int, lower: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    for alpha in product(*(range(lo, limit + 1) for lo in lower)):
        if sum(alpha) <= limit:
            yield alpha


@dataclass
class DerivativeReport:
    """Per-genus sups of ``|delta^m c(alpha)| jap(g)^N / (jap(alpha)^N V_{g,n})``."""

    n: int
    N: int
    a: int
    sups: dict[int, mpmath.mpf]
    argmax: dict[int, tuple]
    empty: list[int]
    trend: Optional[TrendReport]

    @property
    def passed(self) -> bool:
        return self.trend is not None and self.trend.passed


class EmptyAdmissibleSet(ValueError):
    """No (m, alpha) pair satisfies the threshold inside the degree box."""


def derivative_bound_stat(
    n: int,
    N: int,
    a: int,
    g_range: Iterable[int],
    table: CoeffTable,
    margin: int = 1,
    precision: int = DEFAULT_PRECISION,
    factor: float = 2.0,
) -> DerivativeReport:
    """Measured sup statistic of normalized differences of ``c_{g,n}``.

    For each genus the sup runs over ``|m|`` in ``{2N-1, 2N}`` and over
    ``alpha`` with ``alpha_i >= a`` wherever ``m_i > 0`` and ``|alpha|`` at
    most the degree ``3g-3+n`` plus ``margin``.  A genus whose admissible set
    has no point inside the degree box itself (the margin cells alone give
    identically zero differences) is listed in ``empty``; if every genus is
    empty the call fails.
    """
    sups: dict[int, mpmath.mpf] = {}
    argmax: dict[int, tuple] = {}
    empty: list[int] = []
    sizes = sorted({max(2 * N - 1, 0), 2 * N})
    work = precision + 32
    for g in g_range:
        if not is_stable(g, n):
            continue
        s = Signature(g, n)
        ensure(s, table)
        f = GridFunction.from_coefficients(s, table)
        vol = vgn(s, table).interval(work)
        limit = s.dim + margin
        best, where, inside = None, None, False
        with mp.workprec(work):
            scale = jap(g) ** N
            for m in _orders(n, sizes):
                lower = tuple(a if k else 0 for k in m)
                for alpha in _box(n, limit, lower):
                    inside = inside or sum(alpha) <= s.dim
                    d = delta(f, m, alpha)
                    if not d:
                        value = mpmath.mpf(0)
                    else:
                        value = abs((d.interval(work) / vol).mid()) * scale / jap(sum(alpha)) ** N
                    if best is None or value > best:
                        best, where = value, (m, alpha)
        if not inside:
            # only margin cells, where every difference vanishes identically
            empty.append(g)
        else:
            sups[g] = best
            argmax[g] = where
    if not sups:
        raise EmptyAdmissibleSet(f"no admissible (m, alpha) for n={n}, N={N}, a={a} in the requested genera")
    return DerivativeReport(n, N, a, sups, argmax, empty, TrendReport(sups, factor, empty))
