"""Independent reference computations used by the tests.

Nothing here calls into the recursion engine: intersection numbers come from
the Virasoro (DVV) recursion, closed-form volumes are hand-entered literature
polynomials, and numerical references use plain mpmath routines.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

import mpmath


def double_factorial(k: int) -> int:
    # (-1)!! = 1
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@lru_cache(maxsize=None)
def intersection_number(g: int, ds: tuple[int, ...]) -> Fraction:
    """psi-class intersection number <tau_{d_1} ... tau_{d_n}>_g via the DVV recursion."""
    ds = tuple(sorted(ds, reverse=True))
    n = len(ds)
    if g < 0 or any(d < 0 for d in ds) or sum(ds) != 3 * g - 3 + n or 2 * g - 2 + n <= 0:
        return Fraction(0)
    if g == 0 and ds == (0, 0, 0):
        return Fraction(1)
    if g == 1 and ds == (1,):
        return Fraction(1, 24)
    if ds[0] == 0:
        return Fraction(0)
    k = ds[0] - 1
    rest = ds[1:]
    total = Fraction(0)
    for j, dj in enumerate(rest):
        others = rest[:j] + rest[j + 1 :]
        total += Fraction(double_factorial(2 * k + 2 * dj + 1), double_factorial(2 * dj - 1)) * intersection_number(g, (dj + k,) + others)
    for a in range(k):
        b = k - 1 - a
        w = double_factorial(2 * a + 1) * double_factorial(2 * b + 1)
        total += Fraction(w, 2) * intersection_number(g - 1, (a, b) + rest)
        idx = range(len(rest))
        for r in range(len(rest) + 1):
            for I in combinations(idx, r):
                sI = tuple(rest[i] for i in I)
                sJ = tuple(rest[i] for i in idx if i not in I)
                for g1 in range(g + 1):
                    total += Fraction(w, 2) * intersection_number(g1, (a,) + sI) * intersection_number(g - g1, (b,) + sJ)
    return total / double_factorial(2 * k + 3)


def top_coefficient(g: int, alpha: tuple[int, ...]) -> Fraction:
    """Coefficient of the normalized monomial for |alpha| = 3g-3+n (geometric normalization).

    The top-degree part of the volume is sum <tau_d> prod L^(2d)/(2^d d!); in
    the basis L^(2b)/(4^b (2b+1)!) each factor becomes 2^b (2b+1)!/b!.
    """
    out = intersection_number(g, tuple(alpha))
    for b in alpha:
        out *= Fraction(2 ** b * factorial(2 * b + 1), factorial(b))
    return out


# closed-form volume polynomials in the geometric normalization, as
# functions of the squared lengths and pi^2 (all exact)
def v11(L2, p2):
    return (L2[0] + 4 * p2) / 48


def v04(L2, p2):
    return (4 * p2 + sum(L2)) / 2


def v12(L2, p2):
    s = L2[0] + L2[1]
    return (4 * p2 + s) * (12 * p2 + s) / 192


def v05(L2, p2):
    quartic = sum(t * t for t in L2) / Fraction(8)
    mixed = sum(a * b for a, b in combinations(L2, 2)) / Fraction(2)
    return quartic + mixed + 3 * p2 * sum(L2) + 10 * p2 * p2


# constant terms V_{g,n}(0) in the geometric normalization, as (rational, pi^2-power)
KNOWN_VOLUMES = {
    (0, 4): (Fraction(2), 1),
    (0, 5): (Fraction(10), 2),
    (0, 6): (Fraction(244, 3), 3),
    (1, 1): (Fraction(1, 12), 1),
    (1, 2): (Fraction(1, 4), 2),
    (1, 3): (Fraction(14, 9), 3),
    (2, 1): (Fraction(29, 192), 4),
}


def _m(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def lambda_reference(a, b, dps: int = 60):
    """int_a^b (cosh t - 1)/t dt = Chi(b) - Chi(a) - log(b/a).

    From the origin it is Chi(b) - euler - log(b).
    """
    with mpmath.workdps(dps):
        a, b = _m(a), _m(b)
        if a == 0:
            return mpmath.chi(b) - mpmath.euler - mpmath.log(b)
        return mpmath.chi(b) - mpmath.chi(a) - mpmath.log(b / a)


def sinhc_reference(x, dps: int = 60):
    with mpmath.workdps(dps):
        x = _m(x)
        return mpmath.mpf(1) if x == 0 else mpmath.sinh(x) / x


def pk_series_reference(k: int, x, dps: int = 60):
    """sum over b >= 0 of prod_{j<k}(2b+1-j) x^(2b) / (4^b (2b+1)!) by mpmath.nsum."""
    with mpmath.workdps(dps):
        x = _m(x)

        def term(b):
            b = int(b)
            p = 1
            for j in range(k):
                p *= 2 * b + 1 - j
            return p * x ** (2 * b) / (mpmath.mpf(4) ** b * mpmath.factorial(2 * b + 1))

        return mpmath.nsum(term, [0, mpmath.inf])


def first_order_reference(x, dps: int = 60):
    """prod_j sinh(x_j/2)/(x_j/2)."""
    with mpmath.workdps(dps):
        out = mpmath.mpf(1)
        for v in x:
            out *= sinhc_reference(_m(v) / 2, dps)
        return out


def second_order_coefficient_reference(x, dps: int = 60):
    """Genus-free 1/g coefficient, written directly in cosh/sinh form."""
    with mpmath.workdps(dps):
        xs = [_m(v) for v in x]
        n = len(xs)
        c = [mpmath.cosh(v / 2) for v in xs]
        s = [sinhc_reference(v / 2, dps) for v in xs]

        def prod_except(skip):
            out = mpmath.mpf(1)
            for k in range(n):
                if k not in skip:
                    out *= s[k]
            return out

        single = sum((c[i] + 1 - (xs[i] ** 2 / 16 + 2) * s[i]) * prod_except({i}) for i in range(n))
        pair = sum((c[i] * c[j] + 1 - 2 * s[i] * s[j]) * prod_except({i, j}) for i, j in combinations(range(n), 2))
        rho = 1 / (8 * mpmath.pi ** 2)
        return 8 * rho * single - 4 * rho * pair


def forward_difference(f, alpha, m):
    """(-1)^|m| times the iterated forward difference, one unit step at a time."""
    alpha = list(alpha)
    if not any(m):
        return f(tuple(alpha))
    i = next(k for k, v in enumerate(m) if v)
    m2 = list(m)
    m2[i] -= 1
    shifted = list(alpha)
    shifted[i] += 1
    return forward_difference(f, alpha, m2) - forward_difference(f, shifted, m2)
