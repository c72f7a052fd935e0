"""Verification suites over a filled coefficient table.

Each suite returns a :class:`SuiteResult` holding one line per check with
its verdict and measured constants.  Exact properties are decided in exact
arithmetic (or with validated intervals for strict inequalities between
distinct reals); asymptotic properties are reported as measured sups with
the bounded-trend verdict of :func:`wpvol.asymptotics.trend_verdict`.
"""

from __future__ import annotations

import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import mpmath
from mpmath import iv, mp

from . import asymptotics as asy
from . import discrete as dsc
from .qpi import PiPoly, compare, pi_interval, u, DEFAULT_PRECISION_CEILING, UndecidedComparison
from .recursion import _compute_key, _workspace, ensure, is_stable, vgn
from .store import CoeffTable, alpha_keys, canonical

__all__ = [
    "SuiteResult",
    "CheckConfig",
    "SUITES",
    "run_suite",
    "run_suites",
    "check_symmetry",
    "check_structure",
    "check_u_sequence",
    "check_identities",
    "check_cusp_ratios",
    "check_same_euler",
    "cut_sum",
    "check_cut_sums",
    "check_residuals",
    "check_convergence",
    "check_derivative_bounds",
    "cusp_bounds",
]


@dataclass
class SuiteResult:
    name: str
    lines: list[tuple[bool, str]] = field(default_factory=list)

    def add(self, ok: bool, text: str) -> bool:
        self.lines.append((bool(ok), text))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.lines)

    def report(self) -> str:
        head = f"[{'PASS' if self.passed else 'FAIL'}] suite {self.name}"
        body = [f"  {'PASS' if ok else 'FAIL'} {text}" for ok, text in self.lines]
        return "\n".join([head] + body)


@dataclass
class CheckConfig:
    """Ranges used by the measured (trend) suites."""

    g_min: int = 2
    g_max: int = 8
    n_values: tuple[int, ...] = (1, 2)
    conv_g: tuple[int, int] = (4, 12)
    conv_x: Fraction = Fraction(2)
    N: int = 1
    a: Optional[int] = None
    precision: int = 128
    seed: int = 20240917

    @property
    def g_range(self) -> range:
        return range(self.g_min, self.g_max + 1)


# ---------------------------------------------------------------------------
# exact structure
# ---------------------------------------------------------------------------

def _to_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = x.man_exp
    return Fraction(man) * Fraction(2) ** exp


class _PiSquaredBracket:
    """Rational bounds ``lo <= pi^2 <= hi`` used to decide most orderings without intervals."""

    def __init__(self, prec: int = 256):
        enc = pi_interval(prec) ** 2
        self.lo = _to_fraction(enc.lo)
        self.hi = _to_fraction(enc.hi)

    def leq_scaled(self, small: Fraction, big: Fraction, k: int) -> bool:
        """Decide ``small <= big * pi^(2k)`` for positive rationals and ``k >= 0``."""
        if small <= big * self.lo ** k:
            return True
        if small > big * self.hi ** k:
            return False
        return compare(PiPoly.monomial(small, 0), PiPoly.monomial(big, k)) <= 0


def _signatures(table: CoeffTable, signatures: Optional[Iterable[tuple[int, int]]]) -> list[tuple[int, int]]:
    if signatures is None:
        return table.complete_signatures()
    return list(signatures)


def check_symmetry(table: CoeffTable, signatures=None, result: Optional[SuiteResult] = None) -> SuiteResult:
    """Recompute each coefficient with every distinct entry in the distinguished first slot.

    The recursion singles out the first boundary, so agreement for every
    choice is a genuine permutation-symmetry test rather than a property of
    the canonical storage.
    """
    result = result or SuiteResult("symmetry")
    ws = _workspace(table)
    checked = 0
    bad = None
    for g, n in _signatures(table, signatures):
        if 2 * g - 2 + n == 1 or n == 1:
            continue
        data = table.signature_data(g, n)
        for key, r in data.items():
            for v in sorted(set(key[1:]) - {key[0]}):
                rest = list(key)
                rest.remove(v)
                if _compute_key(ws, g, n, (v,) + tuple(rest)) != r:
                    bad = (g, n, key, v)
                    break
                checked += 1
            if bad:
                break
        if bad:
            break
    if bad:
        result.add(False, f"permutation symmetry broken at (g,n,alpha)={bad[:3]} with {bad[3]} first")
    else:
        result.add(True, f"permutation symmetry: {checked} reordered recomputations agree exactly")
    return result


def check_structure(table: CoeffTable, signatures=None, result: Optional[SuiteResult] = None) -> SuiteResult:
    """Homogeneity, positivity, monotone decrease in alpha and ``0 <= c <= V_{g,n}``."""
    result = result or SuiteResult("structure")
    bracket = _PiSquaredBracket()
    n_entries = n_mono = 0
    problem = None
    for g, n in _signatures(table, signatures):
        d = 3 * g - 3 + n
        data = table.signature_data(g, n)
        if len(data) != len(alpha_keys(g, n)):
            problem = f"({g},{n}) incomplete"
            break
        r0 = data[(0,) * n]
        for key, r in data.items():
            n_entries += 1
            value = table.get(g, n, key)
            if not (value.is_monomial() and value.degree() == d - sum(key)):
                problem = f"homogeneity fails at {(g, n, key)}"
            elif r <= 0:
                problem = f"positivity fails at {(g, n, key)}"
            elif not bracket.leq_scaled(r, r0, sum(key)):
                problem = f"c > V_{{g,n}} at {(g, n, key)}"
            if problem:
                break
            for pos in range(n):
                if pos and key[pos] == key[pos - 1]:
                    continue
                bumped = list(key)
                bumped[pos] += 1
                nxt = canonical(bumped)
                if sum(nxt) > d:
                    continue
                n_mono += 1
                if not bracket.leq_scaled(data[nxt], r, 1):
                    problem = f"monotone decrease fails between {(g, n, key)} and {nxt}"
                    break
            if problem:
                break
        if problem:
            break
    if problem:
        result.add(False, problem)
    else:
        result.add(True, f"homogeneity, positivity, 0 <= c <= V on {n_entries} coefficients")
        result.add(True, f"entrywise monotone decrease on {n_mono} neighbouring pairs")
    return result


def check_u_sequence(result: Optional[SuiteResult] = None, i_max: int = 30, i_mono: int = 60, i_ref: int = 5) -> SuiteResult:
    """``u_i`` increasing, below 1, and ``4^i (u_{i+1} - u_i)`` bounded by its max over ``i <= i_ref``."""
    result = result or SuiteResult("u-sequence")
    mono = all(compare(u(i), u(i + 1)) < 0 for i in range(i_mono))
    below = all(compare(u(i), 1) < 0 for i in range(i_mono + 1))
    result.add(mono, f"u_i strictly increasing for i <= {i_mono}")
    result.add(below, f"u_i < 1 for i <= {i_mono}")
    speed = [(u(i + 1) - u(i)) * 4 ** i for i in range(i_max + 1)]
    ref = speed[0]
    for v in speed[1 : i_ref + 1]:
        if compare(v, ref) > 0:
            ref = v
    over = [i for i, v in enumerate(speed) if compare(v, ref) > 0]
    text = f"4^i (u_(i+1) - u_i) <= {mpmath.nstr(ref.to_mpf(), 8)} (max over i <= {i_ref}) for i <= {i_max}"
    if over:
        text += f"; exceeded from i={over[0]} on ({mpmath.nstr(speed[over[-1]].to_mpf(), 12)} at i={over[-1]})"
    result.add(not over, text)
    # the scaled gaps increase towards 3/4, which is the finite sup
    below = all(compare(v, Fraction(3, 4)) < 0 for v in speed)
    rising = all(compare(a, b) < 0 for a, b in zip(speed, speed[1:]))
    result.add(below and rising, f"4^i (u_(i+1) - u_i) strictly increasing and < 3/4 for i <= {i_max}")
    return result


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-50, 50), rng.randint(1, 12))


def check_identities(result: Optional[SuiteResult] = None, box: int = 6, m_max: int = 3, trials: int = 100, seed: int = 20240917) -> SuiteResult:
    """Telescoping and anti-diagonal difference identities, exhaustively on boxes and on random instances."""
    result = result or SuiteResult("identities")
    rng = random.Random(seed)

    # telescoping: every alpha of a box of side `box`, arities 1..3
    count = 0
    ok = True
    for n in (1, 2, 3):
        values = {a: _random_rational(rng) for a in _cube(n, box + 1)}
        f = dsc.GridFunction.from_values(n, values)
        for alpha in _cube(n, box):
            lhs, rhs = dsc.discrete_integral_identity(f, alpha)
            ok &= lhs == rhs
            count += 1
    for _ in range(trials):
        n = rng.randint(1, 4)
        side = rng.randint(1, box)
        values = {a: _random_rational(rng) for a in _cube(n, side + 1)}
        alpha = tuple(rng.randint(0, side) for _ in range(n))
        lhs, rhs = dsc.discrete_integral_identity(dsc.GridFunction.from_values(n, values), alpha)
        ok &= lhs == rhs
        count += 1
    result.add(ok, f"discrete integration identity: {count} exact instances")

    count = 0
    ok = True
    c = {(i, j): _random_rational(rng) for i in range(box) for j in range(box)}
    for m in range(1, m_max + 1):
        for k in range(2 * box - 1):
            lhs, rhs = dsc.conv_derivative_identity(c, m, k)
            ok &= lhs == rhs
            count += 1
    for _ in range(trials):
        side = rng.randint(1, box)
        c = {(i, j): _random_rational(rng) for i in range(side) for j in range(side)}
        m = rng.randint(1, m_max)
        k = rng.randint(0, 2 * side)
        lhs, rhs = dsc.conv_derivative_identity(c, m, k)
        ok &= lhs == rhs
        count += 1
    result.add(ok, f"anti-diagonal difference identity: {count} exact instances")
    return result


def _cube(n: int, side: int):
    from itertools import product

    return product(range(side), repeat=n)


# ---------------------------------------------------------------------------
# volume ratios
# ---------------------------------------------------------------------------

def _cusp_upper_numerator():
    # pi cosh(pi) - sinh(pi) in the current interval precision
    ep, em = iv.exp(iv.pi), iv.exp(-iv.pi)
    return (iv.pi * (ep + em) - (ep - em)) / 2


@contextmanager
def _iv_precision(prec: int):
    saved = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = saved


def cusp_bounds(prec: int = 128):
    """Interval enclosures of the two endpoints of the cusp-ratio window."""
    with _iv_precision(prec):
        lo = (1 - iv.pi ** 2 / 10) / 12
        hi = _cusp_upper_numerator() / (2 * iv.pi ** 2)
    return lo, hi


def _upper_window_holds(q: Fraction, ceiling: int = DEFAULT_PRECISION_CEILING) -> bool:
    """Decide ``q < (pi cosh pi - sinh pi)/2`` with adaptive interval precision."""
    prec = 64
    while True:
        with _iv_precision(prec):
            bound = _cusp_upper_numerator() / 2
            qi = iv.mpf(q.numerator) / q.denominator
            if qi.b < bound.a:
                return True
            if qi.a > bound.b:
                return False
        if prec >= ceiling:
            raise UndecidedComparison(prec)
        prec *= 2


def check_cusp_ratios(table: CoeffTable, signatures=None, result: Optional[SuiteResult] = None) -> SuiteResult:
    """``(2g-2+n) V_{g,n} / V_{g,n+1}`` strictly inside the window for every computed pair."""
    result = result or SuiteResult("cusp-ratio")
    sigs = set(_signatures(table, signatures))
    pairs = sorted((g, n) for g, n in sigs if (g, n + 1) in sigs)
    lo_low = PiPoly({1: Fraction(1, 12), 2: Fraction(-1, 120)})  # pi^2 * (1/12)(1 - pi^2/10)
    worst_lo, worst_hi = None, None
    ok = True
    for g, n in pairs:
        # ratio = q / pi^2 with q rational because the pi-degrees differ by one
        q = (2 * g - 2 + n) * vgn((g, n), table).coeff(3 * g - 3 + n) / vgn((g, n + 1), table).coeff(3 * g - 2 + n)
        good = compare(PiPoly(q), lo_low) > 0 and _upper_window_holds(q)
        ok &= good
        ratio = mpmath.mpf(q.numerator) / q.denominator / mpmath.pi ** 2
        worst_lo = ratio if worst_lo is None else min(worst_lo, ratio)
        worst_hi = ratio if worst_hi is None else max(worst_hi, ratio)
        if not good:
            result.add(False, f"cusp ratio outside window at (g,n)=({g},{n}): {mpmath.nstr(ratio, 10)}")
    lo, hi = cusp_bounds()
    window = f"({mpmath.nstr(mpmath.mpf(lo.a), 6)}, {mpmath.nstr(mpmath.mpf(hi.b), 6)})"
    if pairs:
        result.add(ok, f"cusp ratio in {window} for {len(pairs)} pairs; observed range [{mpmath.nstr(worst_lo, 6)}, {mpmath.nstr(worst_hi, 6)}]")
    else:
        result.add(False, "no (g,n),(g,n+1) pairs available")
    return result


def check_same_euler(table: CoeffTable, cfg: CheckConfig, result: Optional[SuiteResult] = None) -> SuiteResult:
    """``jap(g) |V_{g-1,n+2}/V_{g,n} - 1|`` and ``8 pi^2 g V_{g,n-1}/V_{g,n}`` (reported)."""
    result = result or SuiteResult("same-euler")
    with mp.workprec(cfg.precision):
        for n in cfg.n_values:
            vals = {}
            for g in cfg.g_range:
                if not (is_stable(g, n) and is_stable(g - 1, n + 2)):
                    continue
                ratio = vgn((g - 1, n + 2), table).to_mpf(cfg.precision) / vgn((g, n), table).to_mpf(cfg.precision)
                vals[g] = asy.jap(g) * abs(ratio - 1)
            if vals:
                rep = asy.trend_verdict(vals)
                result.add(rep.passed, f"same Euler characteristic, n={n}: {rep.summary()}")
            guard = []
            for g in cfg.g_range:
                if n >= 2 and is_stable(g, n - 1):
                    r = vgn((g, n - 1), table).to_mpf(cfg.precision) / vgn((g, n), table).to_mpf(cfg.precision)
                    guard.append(f"g={g}: {mpmath.nstr(8 * mpmath.pi ** 2 * g * r, 5)}")
            if guard:
                result.add(True, f"(reported) 8 pi^2 g V_(g,n-1)/V_(g,n), n={n}: " + ", ".join(guard))
    return result


def cut_sum(g: int, n: int, n1: int, N1: int, N2: int, table: CoeffTable, precision: int = 128) -> Optional[mpmath.mpf]:
    """``jap(g)^(N1+N2+1)/V_{g,n} * sum V_{g1,n1+1} V_{g2,n2+1} / (jap(g1)^N1 jap(g2)^N2)``.

    The sum runs over ``g1 + g2 = g`` with ``2 g_i + n_i > N_i + 1``; returns
    None when that index set is empty.
    """
    n2 = n - n1
    with mp.workprec(precision):
        total = mpmath.mpf(0)
        used = False
        for g1 in range(g + 1):
            g2 = g - g1
            if 2 * g1 + n1 > N1 + 1 and 2 * g2 + n2 > N2 + 1:
                used = True
                prod = vgn((g1, n1 + 1), table).to_mpf(precision) * vgn((g2, n2 + 1), table).to_mpf(precision)
                total += prod / (asy.jap(g1) ** N1 * asy.jap(g2) ** N2)
        if not used:
            return None
        return total * asy.jap(g) ** (N1 + N2 + 1) / vgn((g, n), table).to_mpf(precision)


def check_cut_sums(table: CoeffTable, cfg: CheckConfig, result: Optional[SuiteResult] = None, orders: int = 2) -> SuiteResult:
    """Bounded trend of the normalized cut sums for ``N1, N2 <= orders`` and every split of ``n``."""
    result = result or SuiteResult("cut-sums")
    for n in cfg.n_values:
        for n1 in range(n + 1):
            for N1 in range(orders + 1):
                for N2 in range(orders + 1):
                    vals = {}
                    for g in cfg.g_range:
                        if not is_stable(g, n):
                            continue
                        v = cut_sum(g, n, n1, N1, N2, table, cfg.precision)
                        if v is not None:
                            vals[g] = v
                    if not vals:
                        continue
                    rep = asy.trend_verdict(vals)
                    result.add(rep.passed, f"cut sum n={n} n1={n1} N1={N1} N2={N2}: max/first = {mpmath.nstr(rep.ratio, 4)} from g={rep.g_min}")
    return result


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def residual_sups(n: int, g_range: Iterable[int], table: CoeffTable, order: str, precision: int = 128, N: int = 1, a: Optional[int] = None) -> dict[int, mpmath.mpf]:
    """Sup over the grid of the normalized residual of ``F0``, ``F1`` or ``FN``."""
    out = {}
    for g in g_range:
        if not is_stable(g, n):
            continue
        ensure((g, n), table)
        if order == "R0":
            pts = asy.grid_points(n, include_zero=False)
            out[g] = max(asy.R0((g, n), x, table, precision) for x in pts)
        elif order == "R1":
            pts = asy.grid_points(n)
            out[g] = max(asy.R1((g, n), x, table, precision) for x in pts)
        elif order == "RN":
            approx = dsc.build_FN((g, n), N, a, table)
            pts = asy.grid_points(n)
            out[g] = max(dsc.RN((g, n), x, approx, table, precision) for x in pts)
        else:
            raise ValueError(f"unknown residual {order!r}")
    return out


def check_residuals(table: CoeffTable, cfg: CheckConfig, result: Optional[SuiteResult] = None) -> SuiteResult:
    result = result or SuiteResult("residuals")
    for n in cfg.n_values:
        for name in ("R0", "R1", "RN"):
            vals = residual_sups(n, cfg.g_range, table, name, cfg.precision, cfg.N, cfg.a)
            rep = asy.trend_verdict(vals)
            label = name if name != "RN" else f"RN (N={cfg.N}, a={cfg.a if cfg.a is not None else 2 * cfg.N + 2})"
            result.add(rep.passed, f"{label} n={n}: {rep.summary()}")
        # exactness at the origin
        with mp.workprec(cfg.precision):
            zero = (Fraction(0),) * n
            ones = all(
                asy.eval_volume_exact((g, n), zero, table) == vgn((g, n), table)
                and asy.F1((g, n), zero, table, cfg.precision) == 1
                and dsc.build_FN((g, n), cfg.N, cfg.a, table).is_one_at_zero()
                for g in cfg.g_range
                if is_stable(g, n)
            )
        result.add(ones, f"V(0)/V = F0(0) = F1(0) = FN(0) = 1 exactly, n={n}")
    return result


def convergence_gaps(table: CoeffTable, g_values: Sequence[int], x: Fraction = Fraction(2), precision: int = 128) -> dict[int, mpmath.mpf]:
    """``|g (V_{g,1}(x)/V_{g,1} - F0(x)) - f1(x)|`` for each genus."""
    out = {}
    with mp.workprec(precision):
        for g in g_values:
            ratio = asy.volume_ratio((g, 1), (x,), table, precision).mid()
            out[g] = abs(g * (ratio - asy.F0((g, 1), (x,), precision)) - asy.f1(1, (x,), precision))
    return out


def check_convergence(table: CoeffTable, cfg: CheckConfig, result: Optional[SuiteResult] = None) -> SuiteResult:
    result = result or SuiteResult("second-order convergence")
    g0, g1 = cfg.conv_g
    gaps = convergence_gaps(table, range(g0, g1 + 1), cfg.conv_x, cfg.precision)
    seq = [gaps[g] for g in range(g0, g1 + 1)]
    ok = all(b < a for a, b in zip(seq, seq[1:]))
    text = ", ".join(f"g={g}: {mpmath.nstr(v, 6)}" for g, v in gaps.items())
    result.add(ok, f"|g (ratio - F0) - f1| at x={cfg.conv_x}, n=1 strictly decreasing: {text}")
    return result


# ---------------------------------------------------------------------------
# derivative bounds
# ---------------------------------------------------------------------------

def check_derivative_bounds(table: CoeffTable, cfg: CheckConfig, result: Optional[SuiteResult] = None, orders: Sequence[int] = (1, 2)) -> SuiteResult:
    result = result or SuiteResult("derivative")
    for n in cfg.n_values:
        rep0 = dsc.derivative_bound_stat(n, 0, 0, cfg.g_range, table, precision=cfg.precision)
        # the N = 0 statistic is c(alpha)/V; decide <= 1 exactly
        exact = all(
            compare(table.get(g, n, key), vgn((g, n), table)) <= 0
            for g in cfg.g_range
            if is_stable(g, n)
            for key in alpha_keys(g, n)
        )
        result.add(exact, f"N=0, n={n}: c(alpha)/V <= 1 exactly; sups {rep0.trend.summary()}")
        for N in orders:
            for a in (2 * N, 2 * N + 2, 2 * N + 4):
                try:
                    rep = dsc.derivative_bound_stat(n, N, a, cfg.g_range, table, precision=cfg.precision)
                except dsc.EmptyAdmissibleSet as exc:
                    result.add(False, str(exc))
                    continue
                skipped = f" (empty admissible set for g in {rep.empty})" if rep.empty else ""
                result.add(rep.passed, f"N={N}, a={a}, n={n}: {rep.trend.summary()}{skipped}")
    return result


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

SUITES = ("exact", "ratios", "residuals", "derivative")


def prepare(table: CoeffTable, cfg: CheckConfig, chi_max: int = 12, n_max: int = 5) -> None:
    """Fill everything the suites read: the desk-scale block and the trend ranges."""
    from .recursion import fill

    fill(table, chi_max, n_max)
    for n in cfg.n_values:
        for g in cfg.g_range:
            if is_stable(g, n):
                ensure((g, n + 1) if n + 1 <= 2 else (g, n), table)
                ensure((g, n), table)
    for g in range(cfg.conv_g[0], cfg.conv_g[1] + 1):
        ensure((g, 1), table)


def run_suite(name: str, table: CoeffTable, cfg: Optional[CheckConfig] = None) -> list[SuiteResult]:
    cfg = cfg or CheckConfig()
    if name == "exact":
        return [
            check_structure(table),
            check_symmetry(table),
            check_u_sequence(),
            check_identities(seed=cfg.seed),
        ]
    if name == "ratios":
        return [check_cusp_ratios(table), check_same_euler(table, cfg), check_cut_sums(table, cfg)]
    if name == "residuals":
        return [check_residuals(table, cfg), check_convergence(table, cfg)]
    if name == "derivative":
        return [check_derivative_bounds(table, cfg)]
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")


def run_suites(names: Sequence[str], table: CoeffTable, cfg: Optional[CheckConfig] = None) -> list[SuiteResult]:
    out = []
    for name in names:
        out.extend(run_suite(name, table, cfg))
    return out
