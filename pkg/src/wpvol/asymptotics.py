"""Evaluation of volume polynomials and their explicit large-genus approximants.

Numeric quantities are :class:`mpmath.mpf` values computed at a requested
binary precision (default 128 bits).  Ratios ``V_{g,n}(x) / V_{g,n}`` are
close to 1 and the residuals of interest shrink like powers of ``1/g``, so
double precision is never used on these paths.

Notation used throughout:

* ``s(x) = sinhc(x/2)`` and ``c(x) = cosh(x/2)``;
* ``jap(t) = sqrt(1 + t^2)``, applied to a vector through ``|x| = sum x_i``;
* ``w_b(x) = x^(2b) / (2^(2b) (2b+1)!)``, the normalized monomial paired
  with the coefficient index ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Callable, Mapping, Sequence

import mpmath
from mpmath import mp

from .qpi import Interval, PiPoly
from .recursion import Signature, _sig, coeff, ensure, vgn, vgn_or_zero
from .store import CoeffTable

__all__ = [
    "X_GRID",
    "sinhc",
    "jap",
    "exact_length",
    "weight",
    "eval_volume_exact",
    "eval_volume",
    "volume_ratio",
    "F0",
    "F1",
    "f1",
    "p_k",
    "pk_closed_form",
    "pk_generating_sum",
    "psi1",
    "c_hat1",
    "lambda_intensity",
    "lambda_series",
    "grid_points",
    "R0",
    "R1",
    "normalized_residual",
    "TrendReport",
    "trend_verdict",
]

DEFAULT_PRECISION = 128

#: per-coordinate lengths of the residual grids
X_GRID: tuple[Fraction, ...] = tuple(Fraction(v) for v in ("1/4", "1/2", "1", "2", "4", "8"))


# ---------------------------------------------------------------------------
# elementary functions
# ---------------------------------------------------------------------------

def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def sinhc(x, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """``sinh(x)/x`` with value 1 at 0.

    Below ``|x| < 1/4`` the Taylor series is summed directly, which avoids
    the cancellation in ``sinh(x)/x`` near the origin.
    """
    with mp.workprec(precision + 10):
        t = _mpf(x)
        if abs(t) >= 0.25:
            out = mpmath.sinh(t) / t
        else:
            t2 = t * t
            out = term = mpmath.mpf(1)
            k = 1
            eps = mpmath.ldexp(1, -(precision + 12))
            while abs(term) > eps:
                term = term * t2 / ((2 * k) * (2 * k + 1))
                out += term
                k += 1
    with mp.workprec(precision):
        return +out


def jap(x) -> mpmath.mpf:
    """Japanese bracket ``sqrt(1 + t^2)``; for a vector ``t = sum x_i``."""
    if isinstance(x, (list, tuple)):
        t = sum((_mpf(v) for v in x), mpmath.mpf(0))
    else:
        t = _mpf(x)
    return mpmath.sqrt(1 + t * t)


def exact_length(x) -> Fraction:
    """Exact rational value of a length given as int, Fraction, float, str or mpf."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        man, exp = mpmath.mpf(x).man_exp
        return Fraction(man) * Fraction(2) ** exp
    raise TypeError(f"cannot read {x!r} as an exact length")


def weight(b: int, x: Fraction) -> Fraction:
    """``x^(2b) / (2^(2b) (2b+1)!)`` exactly."""
    return x ** (2 * b) / (4 ** b * factorial(2 * b + 1))


# ---------------------------------------------------------------------------
# volume evaluation
# ---------------------------------------------------------------------------

def _check_lengths(s: Signature, x) -> tuple:
    x = tuple(x)
    if len(x) != s.n:
        raise ValueError(f"expected {s.n} lengths, got {len(x)}")
    return x


def eval_volume_exact(sig, x: Sequence, table: CoeffTable) -> PiPoly:
    """``V_{g,n}(x)`` in Q[pi^2] for rational lengths ``x``."""
    s = _sig(sig)
    xs = tuple(exact_length(v) for v in _check_lengths(s, x))
    if any(v < 0 for v in xs):
        raise ValueError("lengths must be non-negative")
    ensure(s, table)
    data = table.signature_data(s.g, s.n)
    # weights per coordinate, reused across all multi-indices
    w = [[weight(b, v) for b in range(s.dim + 1)] for v in xs]
    by_degree: dict[int, Fraction] = {}
    for alpha in product(range(s.dim + 1), repeat=s.n):
        total = sum(alpha)
        if total > s.dim:
            continue
        term = Fraction(1)
        for j, a in enumerate(alpha):
            term *= w[j][a]
            if not term:
                break
        if term:
            r = data[tuple(sorted(alpha, reverse=True))]
            d = s.dim - total
            by_degree[d] = by_degree.get(d, Fraction(0)) + r * term
    return PiPoly(by_degree)


def eval_volume(sig, x: Sequence, table: CoeffTable, precision: int = DEFAULT_PRECISION) -> Interval:
    """Validated enclosure of ``V_{g,n}(x)``.

    Lengths that are exact binary or decimal rationals (int, Fraction, float,
    mpf, str) are evaluated exactly and rounded once; anything else is
    evaluated by outward-rounded interval arithmetic.  ``width()`` of the
    result is the error bound.
    """
    s = _sig(sig)
    x = _check_lengths(s, x)
    try:
        xs = [exact_length(v) for v in x]
    except TypeError:
        return _eval_volume_interval(s, x, table, precision)
    return eval_volume_exact(s, xs, table).interval(precision)


def _eval_volume_interval(s: Signature, x, table: CoeffTable, precision: int) -> Interval:
    ensure(s, table)
    work = precision + 32
    xs = [Interval.point(v, work) for v in x]
    total = Interval.from_rational(0, work)
    for alpha in product(range(s.dim + 1), repeat=s.n):
        if sum(alpha) > s.dim:
            continue
        term = coeff(s, alpha, table).interval(work)
        for v, a in zip(xs, alpha):
            term = term * (v * v) ** a / (4 ** a * factorial(2 * a + 1))
        total = total + term
    return total


def volume_ratio(sig, x: Sequence, table: CoeffTable, precision: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of ``V_{g,n}(x) / V_{g,n}``."""
    s = _sig(sig)
    work = precision + 16
    return eval_volume(s, x, table, work) / vgn(s, table).interval(work)


# ---------------------------------------------------------------------------
# approximants
# ---------------------------------------------------------------------------

def _half_functions(x, precision):
    """Lists of ``c(x_i)`` and ``s(x_i)`` at the working precision."""
    cs, ss = [], []
    for v in x:
        t = _mpf(v) / 2
        cs.append(mpmath.cosh(t))
        ss.append(sinhc(t, precision))
    return cs, ss


def _prod(values) -> mpmath.mpf:
    out = mpmath.mpf(1)
    for v in values:
        out *= v
    return out


def F0(sig, x: Sequence, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """First-order approximant ``prod_j sinhc(x_j / 2)``; independent of the genus."""
    s = _sig(sig)
    x = _check_lengths(s, x)
    with mp.workprec(precision):
        return _prod(sinhc(_mpf(v) / 2, precision) for v in x)


def _single_bracket(cs, ss, xs, i):
    return cs[i] + 1 - (xs[i] ** 2 / 16 + 2) * ss[i]


def _pair_bracket(cs, ss, i, j):
    return cs[i] * cs[j] + 1 - 2 * ss[i] * ss[j]


def _second_order_sums(x, precision):
    """The two g-free sums shared by ``F1`` and ``f1``."""
    xs = [_mpf(v) for v in x]
    cs, ss = _half_functions(xs, precision)
    n = len(xs)
    single = mpmath.mpf(0)
    for i in range(n):
        single += _single_bracket(cs, ss, xs, i) * _prod(ss[k] for k in range(n) if k != i)
    pair = mpmath.mpf(0)
    for i, j in combinations(range(n), 2):
        pair += _pair_bracket(cs, ss, i, j) * _prod(ss[k] for k in range(n) if k not in (i, j))
    return _prod(ss), single, pair


def F1(sig, x: Sequence, table: CoeffTable, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Second-order approximant of ``V_{g,n}(x)/V_{g,n}`` with exact volume ratios.

    Volumes of unstable signatures (only ``V_{0,2}``, reached from ``(1,1)``)
    count as zero.
    """
    s = _sig(sig)
    x = _check_lengths(s, x)
    with mp.workprec(precision + 16):
        v = vgn(s, table).to_mpf(precision + 16)
        r_genus = vgn_or_zero(s.g - 1, s.n + 1, table).to_mpf(precision + 16) / v if s.g >= 1 else 0
        r_cusp = vgn_or_zero(s.g, s.n - 1, table).to_mpf(precision + 16) / v if s.n >= 2 else 0
        base, single, pair = _second_order_sums(x, precision + 16)
        out = base + 8 * r_genus * single - 4 * r_cusp * pair
    with mp.workprec(precision):
        return +out


def f1(n: int, x: Sequence, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """The genus-free coefficient of ``1/g`` in the expansion of ``V_{g,n}(x)/V_{g,n}``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x = tuple(x)
    if len(x) != n:
        raise ValueError(f"expected {n} lengths, got {len(x)}")
    with mp.workprec(precision + 16):
        _, single, pair = _second_order_sums(x, precision + 16)
        pi2 = mpmath.pi ** 2
        out = single / pi2 - pair / (2 * pi2)
    with mp.workprec(precision):
        return +out


# ---------------------------------------------------------------------------
# the p_k basis
# ---------------------------------------------------------------------------

def p_k(k: int, alpha):
    """``prod_{j<k} (2 alpha + 1 - j)``; the empty product is 1."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1
    for j in range(k):
        out *= 2 * alpha + 1 - j
    return out


def pk_closed_form(k: int, x, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """``sum_alpha p_k(alpha) w_alpha(x)`` in closed form.

    ``(x/2)^k sinhc(x/2)`` for even ``k`` and ``(x/2)^(k-1) cosh(x/2)`` for odd ``k``.
    """
    with mp.workprec(precision + 10):
        h = _mpf(x) / 2
        if k % 2 == 0:
            out = h ** k * sinhc(h, precision + 10)
        else:
            out = h ** (k - 1) * mpmath.cosh(h)
    with mp.workprec(precision):
        return +out


def pk_generating_sum(k: int, x, truncation: int, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Partial sum ``sum_{alpha <= T} p_k(alpha) w_alpha(x)``, summed exactly then rounded."""
    if truncation < 1:
        raise ValueError("truncation must be at least 1")
    xq = exact_length(x)
    total = sum((p_k(k, a) * weight(a, xq) for a in range(truncation + 1)), Fraction(0))
    with mp.workprec(precision):
        return mpmath.mpf(total.numerator) / total.denominator


# ---------------------------------------------------------------------------
# second-order coefficient approximations (exact)
# ---------------------------------------------------------------------------

def _neighbour_volumes(s: Signature, table: CoeffTable) -> tuple[PiPoly, PiPoly]:
    genus = vgn_or_zero(s.g - 1, s.n + 1, table) if s.g >= 1 else PiPoly.zero()
    cusp = vgn_or_zero(s.g, s.n - 1, table) if s.n >= 2 else PiPoly.zero()
    return genus, cusp


def psi1(sig, alpha: Sequence[int], table: CoeffTable) -> PiPoly:
    """Second-order approximation of the first difference ``delta_1 c_{g,n}(alpha)``."""
    s = _sig(sig)
    alpha = tuple(alpha)
    if len(alpha) != s.n:
        raise ValueError(f"multi-index of length {len(alpha)} for n={s.n}")
    genus, cusp = _neighbour_volumes(s, table)
    a1 = alpha[0]
    out = genus * (4 * (4 * a1 - 1 + 2 * (a1 == 0)))
    weight_sum = sum(4 * aj + 2 - (a1 == 0 and aj == 0) for aj in alpha[1:])
    return out + cusp * (4 * weight_sum)


def c_hat1(sig, alpha: Sequence[int], table: CoeffTable) -> PiPoly:
    """Second-order approximation of the coefficient ``c_{g,n}(alpha)``."""
    s = _sig(sig)
    alpha = tuple(alpha)
    if len(alpha) != s.n:
        raise ValueError(f"multi-index of length {len(alpha)} for n={s.n}")
    genus, cusp = _neighbour_volumes(s, table)
    single = sum(Fraction(p_k(1, a) + (a == 0) - 2) - Fraction(p_k(2, a), 4) for a in alpha)
    pair = sum(p_k(1, a) * p_k(1, b) + (a == 0 and b == 0) - 2 for a, b in combinations(alpha, 2))
    return vgn(s, table) + genus * (8 * single) - cusp * (4 * pair)


# ---------------------------------------------------------------------------
# Poisson intensity
# ---------------------------------------------------------------------------

def _lambda_args(a, b):
    a, b = _mpf(a), _mpf(b)
    if not (a >= 0 and b >= a):
        raise ValueError("need 0 <= a <= b")
    return a, b


def lambda_series(a, b, precision: int = DEFAULT_PRECISION) -> tuple[mpmath.mpf, mpmath.mpf]:
    """``int_a^b (2/x) sinh(x/2)^2 dx`` by term-by-term integration.

    The integrand is ``(cosh x - 1)/x = sum_{k>=1} x^(2k-1)/(2k)!``, so the
    integral is ``sum_k (b^(2k) - a^(2k)) / (2k (2k)!)``.  Returns the value
    and a bound on the truncation plus rounding error.
    """
    with mp.workprec(precision + 20):
        a, b = _lambda_args(a, b)
        eps = mpmath.ldexp(1, -(precision + 8))
        total = mpmath.mpf(0)
        pa, pb = a * a, b * b
        k, fact = 1, mpmath.mpf(2)
        while True:
            total += (pb - pa) / (2 * k * fact)
            # tail after term k is below sum_{j>k} b^(2j)/(2j (2j)!), whose
            # consecutive ratios are at most b^2/((2k+3)(2k+4)) from j = k+1 on
            nxt = pb * b * b / ((2 * k + 2) * fact * (2 * k + 1) * (2 * k + 2))
            rho = b * b / ((2 * k + 3) * (2 * k + 4))
            if rho < 0.5 and nxt / (1 - rho) < eps * (1 + abs(total)):
                tail = nxt / (1 - rho)
                break
            pa, pb = pa * a * a, pb * b * b
            k += 1
            fact *= (2 * k - 1) * (2 * k)
        bound = tail + k * mpmath.ldexp(abs(total) + 1, -(precision + 18))
        # rounding the value to the output precision
        bound += mpmath.ldexp(abs(total), -precision)
    with mp.workprec(precision):
        return +total, mpmath.mpf(bound, rounding="u")


def lambda_intensity(a, b, precision: int = DEFAULT_PRECISION) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Poisson intensity ``lambda_{a,b} = int_a^b (2/x) sinh(x/2)^2 dx``.

    Gauss-Legendre quadrature at ``precision`` bits.  The returned bound is the
    distance to the independently computed series value plus that value's own
    rigorous error bound, so it is a certified bound on the quadrature error.
    """
    with mp.workprec(precision + 20):
        a, b = _lambda_args(a, b)
        if a == b:
            return mpmath.mpf(0), mpmath.mpf(0)
        value = mpmath.quad(lambda t: 2 * mpmath.sinh(t / 2) ** 2 / t, [a, b], method="gauss-legendre")
        ref, ref_bound = lambda_series(a, b, precision + 20)
        bound = abs(value - ref) + ref_bound + mpmath.ldexp(abs(value), -precision)
    with mp.workprec(precision):
        return +value, mpmath.mpf(bound, rounding="u")


# ---------------------------------------------------------------------------
# residual statistics
# ---------------------------------------------------------------------------

def grid_points(n: int, grid: Sequence = X_GRID, include_zero: bool = True) -> list[tuple]:
    """Zero vector (optionally, unless already present) followed by the product grid in lexicographic order."""
    pts = [tuple(p) for p in product(grid, repeat=n)]
    zero = (Fraction(0),) * n
    if include_zero and zero not in pts:
        pts.insert(0, zero)
    return pts


def normalized_residual(ratio, approx, g: int, x: Sequence, order: int) -> mpmath.mpf:
    """``|ratio - approx| * jap(g)^(N+1) / (jap(x)^(3N+1) e^(|x|/2))`` for ``N = order``.

    Order 0 uses ``|x|`` in place of ``jap(x)``, which is undefined at ``x = 0``.
    """
    total = sum((_mpf(v) for v in x), mpmath.mpf(0))
    diff = abs(_mpf(ratio) - approx)
    if order == 0:
        if total == 0:
            raise ValueError("the first-order residual is not defined at x = 0")
        scale = total
    else:
        scale = jap(total) ** (3 * order + 1)
    return diff * jap(g) ** (order + 1) / (scale * mpmath.exp(total / 2))


def R0(sig, x: Sequence, table: CoeffTable, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    s = _sig(sig)
    with mp.workprec(precision):
        ratio = volume_ratio(s, x, table, precision).mid()
        return normalized_residual(ratio, F0(s, x, precision), s.g, x, 0)


def R1(sig, x: Sequence, table: CoeffTable, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    s = _sig(sig)
    with mp.workprec(precision):
        ratio = volume_ratio(s, x, table, precision).mid()
        return normalized_residual(ratio, F1(s, x, table, precision), s.g, x, 1)


@dataclass
class TrendReport:
    """Per-genus sup statistics and the bounded-trend verdict.

    The verdict holds when ``max_g stat(g) <= factor * stat(g_min)``.
    """

    values: dict[int, mpmath.mpf]
    factor: float = 2.0
    skipped: list[int] = field(default_factory=list)

    @property
    def g_min(self) -> int:
        return min(self.values)

    @property
    def maximum(self) -> mpmath.mpf:
        return max(self.values.values())

    @property
    def ratio(self) -> mpmath.mpf:
        base = self.values[self.g_min]
        return self.maximum / base if base else mpmath.inf

    @property
    def passed(self) -> bool:
        return bool(self.values) and self.maximum <= self.factor * self.values[self.g_min]

    def summary(self) -> str:
        parts = ", ".join(f"g={g}: {mpmath.nstr(v, 6)}" for g, v in sorted(self.values.items()))
        return f"{parts}; max/first = {mpmath.nstr(self.ratio, 4)}"


def trend_verdict(values: Mapping[int, mpmath.mpf], factor: float = 2.0) -> TrendReport:
    if not values:
        raise ValueError("no values to assess")
    return TrendReport(dict(values), factor)


def sup_over_grid(stat: Callable[[tuple], mpmath.mpf], points: Sequence[tuple]) -> mpmath.mpf:
    return max(stat(x) for x in points)
