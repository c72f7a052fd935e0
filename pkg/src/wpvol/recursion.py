"""Mirzakhani's topological recursion for the volume coefficients.

The volume polynomial of signature ``(g, n)`` is written as

    V_{g,n}(x) = sum_{|alpha| <= 3g-3+n} c_{g,n}(alpha) prod_j x_j^(2 alpha_j) / (2^(2 alpha_j) (2 alpha_j + 1)!)

and every coefficient is a positive rational multiple of ``pi^(2(3g-3+n-|alpha|))``.
The recursion runs on those rational multiples only; the pi-degree is implied
by the key.  :func:`coeff` and the ``term_*`` functions return :class:`PiPoly`.
"""

from __future__ import annotations

import logging
import multiprocessing
import weakref
from bisect import insort
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Sequence

from gmpy2 import mpq

from .qpi import PiPoly, u, u_rational
from .store import CoeffTable, alpha_keys, canonical

__all__ = [
    "Signature",
    "VolumePolynomial",
    "BASE_CASES",
    "coeff",
    "term_A",
    "term_B",
    "term_C",
    "separating_configs",
    "volume_poly",
    "vgn",
    "vgn_or_zero",
    "ensure",
    "fill",
    "dependencies",
    "required_signatures",
    "is_stable",
]

log = logging.getLogger(__name__)

ZERO = Fraction(0)
_QZERO = mpq(0)
_q_cache: list = []


def _q(i: int):
    # u_i rational parts as gmpy2 rationals for the inner loops
    while len(_q_cache) <= i:
        r = u_rational(len(_q_cache))
        _q_cache.append(mpq(r.numerator, r.denominator))
    return _q_cache[i]


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


# rational parts of the |chi| = 1 coefficients, per convention
BASE_CASES = {
    "paper": {
        (0, 3): {(0, 0, 0): Fraction(1)},
        (1, 1): {(0,): Fraction(1, 6), (1,): Fraction(1)},
    },
    "half": {
        (0, 3): {(0, 0, 0): Fraction(1)},
        (1, 1): {(0,): Fraction(1, 12), (1,): Fraction(1, 2)},
    },
}


def is_stable(g: int, n: int) -> bool:
    return g >= 0 and n >= 1 and 2 * g - 2 + n > 0


@dataclass(frozen=True, order=True)
class Signature:
    """Topological type ``(g, n)`` with ``n >= 1`` and ``2g - 2 + n > 0``."""

    g: int
    n: int

    def __post_init__(self):
        if not is_stable(self.g, self.n):
            raise ValueError(f"invalid signature (g={self.g}, n={self.n}): need n >= 1 and 2g-2+n > 0")

    @property
    def chi(self) -> int:
        """Absolute Euler characteristic ``2g - 2 + n``."""
        return 2 * self.g - 2 + self.n

    @property
    def dim(self) -> int:
        """Complex dimension ``3g - 3 + n``, the top degree in the ``x_i^2``."""
        return 3 * self.g - 3 + self.n


def _sig(sig) -> Signature:
    return sig if isinstance(sig, Signature) else Signature(*sig)


@dataclass(frozen=True)
class VolumePolynomial:
    signature: Signature
    coeffs: dict  # canonical alpha -> PiPoly

    @property
    def vgn(self) -> PiPoly:
        return self.coeffs[(0,) * self.signature.n]

    def coefficient(self, alpha) -> PiPoly:
        key = canonical(alpha)
        if any(a < 0 for a in key):
            return PiPoly.zero()
        return self.coeffs.get(key, PiPoly.zero())


# ---------------------------------------------------------------------------
# dependency structure
# ---------------------------------------------------------------------------

def _split_sizes(g: int, n: int):
    """Admissible (g1, n1, g2, n2) with g1 + g2 = g and n1 + n2 = n - 1."""
    for g1 in range(g + 1):
        for n1 in range(n):
            g2, n2 = g - g1, n - 1 - n1
            if 2 * g1 - 2 + n1 + 1 > 0 and 2 * g2 - 2 + n2 + 1 > 0:
                yield g1, n1, g2, n2


def dependencies(g: int, n: int) -> set[tuple[int, int]]:
    """Signatures whose coefficients enter the recursion for ``(g, n)``."""
    if 2 * g - 2 + n == 1:
        return set()
    deps = set()
    if n >= 2 and is_stable(g, n - 1):
        deps.add((g, n - 1))
    if g >= 1 and is_stable(g - 1, n + 1):
        deps.add((g - 1, n + 1))
    for g1, n1, g2, n2 in _split_sizes(g, n):
        deps.add((g1, n1 + 1))
        deps.add((g2, n2 + 1))
    return deps


def required_signatures(targets: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Transitive dependency closure of ``targets``, sorted by (|chi|, g, n)."""
    seen: set[tuple[int, int]] = set()
    stack = [tuple(t) for t in targets]
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        stack.extend(dependencies(*s) - seen)
    return sorted(seen, key=lambda s: (2 * s[0] - 2 + s[1], s[0], s[1]))


# ---------------------------------------------------------------------------
# fast path: whole-signature computation on rational parts
# ---------------------------------------------------------------------------

class _Workspace:
    """Derived lookup structures over a table (columns, pair sums, convolutions)."""

    def __init__(self, table: CoeffTable):
        self.table = table
        self.columns: dict = {}
        self.pairs: dict = {}
        self.convs: dict = {}

    def column(self, g: int, n: int, rest: tuple[int, ...]) -> tuple:
        """``k -> r_{g,n}(k, rest)`` for ``k = 0 .. 3g-3+n-|rest|``; ``rest`` is canonical."""
        key = (g, n, rest)
        col = self.columns.get(key)
        if col is not None:
            return col
        data = self.table.signature_data(g, n)
        top = 3 * g - 3 + n - sum(rest)
        out = []
        for k in range(top + 1):
            full = list(rest)
            insort(full, k, key=lambda v: -v)
            r = data[tuple(full)]
            out.append(mpq(r.numerator, r.denominator))
        col = tuple(out)
        self.columns[key] = col
        return col

    def pair_sums(self, g: int, n: int, rest: tuple[int, ...]) -> list:
        """``s -> sum_{k1+k2=s} r_{g,n}(k1, k2, rest)``."""
        key = (g, n, rest)
        out = self.pairs.get(key)
        if out is not None:
            return out
        top = 3 * g - 3 + n - sum(rest)
        out = [_QZERO] * (top + 1) if top >= 0 else []
        for k1 in range(top + 1):
            col = self.column(g, n, canonical((k1,) + rest))
            for k2, r in enumerate(col):
                out[k1 + k2] += r
        self.pairs[key] = out
        return out

    def convolution(self, g1: int, a_i: tuple, g2: int, a_j: tuple) -> list:
        """``s -> sum_{k1+k2=s} r_{g1,|I|+1}(k1, alpha_I) r_{g2,|J|+1}(k2, alpha_J)``."""
        key = (g1, a_i, g2, a_j)
        out = self.convs.get(key)
        if out is not None:
            return out
        c1 = self.column(g1, len(a_i) + 1, a_i)
        c2 = self.column(g2, len(a_j) + 1, a_j)
        out = [_QZERO] * max(len(c1) + len(c2) - 1, 0)
        for k1, r1 in enumerate(c1):
            for k2, r2 in enumerate(c2):
                out[k1 + k2] += r1 * r2
        self.convs[key] = out
        return out


_workspaces: "weakref.WeakKeyDictionary[CoeffTable, _Workspace]" = weakref.WeakKeyDictionary()


def _workspace(table: CoeffTable) -> _Workspace:
    ws = _workspaces.get(table)
    if ws is None:
        ws = _Workspace(table)
        _workspaces[table] = ws
    return ws


def _u_dot(values: Sequence, alpha1: int):
    # sum_i q_i * values[i + alpha1 - 2]
    total = _QZERO
    for s in range(max(0, alpha1 - 2), len(values)):
        v = values[s]
        if v:
            total += _q(s - alpha1 + 2) * v
    return total


def _submultisets(rest: tuple[int, ...]):
    """Yield (alpha_I, alpha_J, multiplicity) over all subsets I of the positions of ``rest``."""
    counts = sorted(Counter(rest).items(), reverse=True)
    ranges = [range(m + 1) for _, m in counts]
    for take in product(*ranges):
        weight = 1
        a_i: list[int] = []
        a_j: list[int] = []
        for (value, m), t in zip(counts, take):
            weight *= comb(m, t)
            a_i.extend([value] * t)
            a_j.extend([value] * (m - t))
        yield tuple(a_i), tuple(a_j), weight


def _compute_key(ws: _Workspace, g: int, n: int, alpha: tuple[int, ...]) -> Fraction:
    alpha1, rest = alpha[0], alpha[1:]
    total = _QZERO

    # (A) pants bounded by b_1 and b_j
    if n >= 2:
        for aj, mult in Counter(rest).items():
            rest_j = list(rest)
            rest_j.remove(aj)
            col = ws.column(g, n - 1, tuple(rest_j))
            off = alpha1 + aj - 1
            acc = _QZERO
            for i in range(max(0, -off), len(col) - off):
                acc += _q(i) * col[i + off]
            total += mult * 8 * (2 * aj + 1) * acc

    # (B) non-separating pants
    if g >= 1 and is_stable(g - 1, n + 1):
        total += 16 * _u_dot(ws.pair_sums(g - 1, n + 1, rest), alpha1)

    # (C) separating pants
    for a_i, a_j, weight in _submultisets(rest):
        n1, n2 = len(a_i), len(a_j)
        for g1 in range(g + 1):
            g2 = g - g1
            if 2 * g1 - 1 + n1 > 0 and 2 * g2 - 1 + n2 > 0:
                total += weight * 16 * _u_dot(ws.convolution(g1, a_i, g2, a_j), alpha1)
    return _to_fraction(total)


def _compute_signature(table: CoeffTable, g: int, n: int) -> dict[tuple[int, ...], Fraction]:
    if 2 * g - 2 + n == 1:
        return dict(BASE_CASES[table.convention][(g, n)])
    ws = _workspace(table)
    return {key: _compute_key(ws, g, n, key) for key in alpha_keys(g, n)}


def ensure(sig, table: CoeffTable) -> None:
    """Fill every coefficient of ``sig`` (and its dependencies) into ``table``."""
    s = _sig(sig)
    if table.is_complete(s.g, s.n):
        return
    for g, n in required_signatures([(s.g, s.n)]):
        if not table.is_complete(g, n):
            table.insert_signature(g, n, _compute_signature(table, g, n))


# process-pool plumbing: children inherit the parent's table through fork
_pool_table: CoeffTable | None = None


def _pool_compute(gn):
    return gn, _compute_signature(_pool_table, *gn)


def fill(table: CoeffTable, chi_max: int, n_max: int, workers: int = 1) -> list[tuple[int, int]]:
    """Fill all signatures with ``2g-2+n <= chi_max`` and ``n <= n_max``.

    Levels of equal ``|chi|`` are computed in order; within a level signatures
    are independent and may be computed by ``workers`` processes.  Results do
    not depend on ``workers``.  Returns the newly completed signatures.
    """
    global _pool_table
    targets = [
        (g, n)
        for n in range(1, n_max + 1)
        for g in range(0, (chi_max - n + 2) // 2 + 1)
        if is_stable(g, n) and 2 * g - 2 + n <= chi_max
    ]
    todo = [s for s in required_signatures(targets) if not table.is_complete(*s)]
    levels: dict[int, list[tuple[int, int]]] = {}
    for g, n in todo:
        levels.setdefault(2 * g - 2 + n, []).append((g, n))

    use_pool = workers > 1 and "fork" in multiprocessing.get_all_start_methods()
    for chi in sorted(levels):
        batch = levels[chi]
        if use_pool and len(batch) > 1:
            _pool_table = table
            try:
                ctx = multiprocessing.get_context("fork")
                with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                    results = dict(pool.map(_pool_compute, batch))
            finally:
                _pool_table = None
            for gn in batch:
                table.insert_signature(*gn, results[gn])
        else:
            for gn in batch:
                table.insert_signature(*gn, _compute_signature(table, *gn))
        log.debug("filled level %d: %s", chi, batch)
    return todo


# ---------------------------------------------------------------------------
# public coefficient API
# ---------------------------------------------------------------------------

def coeff(sig, alpha: Sequence[int], table: CoeffTable) -> PiPoly:
    """Exact ``c_{g,n}(alpha)``; zero outside the degree box or for negative entries."""
    s = _sig(sig)
    alpha = tuple(alpha)
    if len(alpha) != s.n:
        raise ValueError(f"multi-index of length {len(alpha)} for n={s.n}")
    if any(a < 0 for a in alpha) or sum(alpha) > s.dim:
        return PiPoly.zero()
    key = canonical(alpha)
    r = table.reduced(s.g, s.n, key)
    if r is None:
        ensure(s, table)
        r = table.reduced(s.g, s.n, key)
    return PiPoly.monomial(r, s.dim - sum(key))


def _coeff_or_zero(g: int, n: int, alpha, table: CoeffTable) -> PiPoly:
    if not is_stable(g, n):
        return PiPoly.zero()
    return coeff(Signature(g, n), alpha, table)


def term_A(sig, alpha: Sequence[int], j: int, table: CoeffTable) -> PiPoly:
    """Contribution of pants bounded by the first and ``j``-th boundaries (``2 <= j <= n``)."""
    s = _sig(sig)
    if not 2 <= j <= s.n:
        raise ValueError(f"j must lie in 2..{s.n}")
    alpha = tuple(alpha)
    a1, aj = alpha[0], alpha[j - 1]
    rest = alpha[1 : j - 1] + alpha[j:]
    total = PiPoly.zero()
    top = 3 * s.g - 3 + s.n - 1 - (a1 + aj - 1) - sum(rest)
    for i in range(max(top + 1, 0)):
        c = _coeff_or_zero(s.g, s.n - 1, (i + a1 + aj - 1,) + rest, table)
        if c:
            total = total + u(i) * c
    return total * (8 * (2 * aj + 1))


def term_B(sig, alpha: Sequence[int], table: CoeffTable) -> PiPoly:
    """Contribution of non-separating pants (zero when ``g = 0``)."""
    s = _sig(sig)
    if s.g < 1 or not is_stable(s.g - 1, s.n + 1):
        return PiPoly.zero()
    alpha = tuple(alpha)
    a1, rest = alpha[0], alpha[1:]
    top = 3 * (s.g - 1) - 3 + s.n + 1 - sum(rest)
    total = PiPoly.zero()
    for i in range(max(0, 2 - a1), top - a1 + 3):
        for k1 in range(i + a1 - 1):
            k2 = i + a1 - 2 - k1
            c = _coeff_or_zero(s.g - 1, s.n + 1, (k1, k2) + rest, table)
            if c:
                total = total + u(i) * c
    return total * 16


def separating_configs(sig) -> list[tuple[int, tuple[int, ...]]]:
    """Admissible ``(g1, I)`` with ``I`` a subset of ``{2..n}`` (1-based positions)."""
    s = _sig(sig)
    positions = list(range(2, s.n + 1))
    out = []
    for g1 in range(s.g + 1):
        for mask in range(1 << len(positions)):
            I = tuple(p for b, p in enumerate(positions) if mask >> b & 1)
            n1, n2 = len(I), len(positions) - len(I)
            if 2 * g1 - 2 + n1 + 1 > 0 and 2 * (s.g - g1) - 2 + n2 + 1 > 0:
                out.append((g1, I))
    return out


def term_C(sig, alpha: Sequence[int], table: CoeffTable) -> PiPoly:
    """Sum over separating configurations of the split contributions."""
    s = _sig(sig)
    alpha = tuple(alpha)
    a1 = alpha[0]
    total = PiPoly.zero()
    for g1, I in separating_configs(s):
        J = tuple(p for p in range(2, s.n + 1) if p not in I)
        a_i = tuple(alpha[p - 1] for p in I)
        a_j = tuple(alpha[p - 1] for p in J)
        g2 = s.g - g1
        top = (3 * g1 - 3 + len(I) + 1 - sum(a_i)) + (3 * g2 - 3 + len(J) + 1 - sum(a_j))
        for i in range(max(0, 2 - a1), top - a1 + 3):
            for k1 in range(i + a1 - 1):
                k2 = i + a1 - 2 - k1
                c1 = _coeff_or_zero(g1, len(I) + 1, (k1,) + a_i, table)
                if not c1:
                    continue
                c2 = _coeff_or_zero(g2, len(J) + 1, (k2,) + a_j, table)
                if c2:
                    total = total + u(i) * c1 * c2
    return total * 16


def volume_poly(sig, table: CoeffTable) -> VolumePolynomial:
    s = _sig(sig)
    ensure(s, table)
    data = table.signature_data(s.g, s.n)
    coeffs = {key: PiPoly.monomial(data[key], s.dim - sum(key)) for key in alpha_keys(s.g, s.n)}
    return VolumePolynomial(s, coeffs)


def vgn(sig, table: CoeffTable) -> PiPoly:
    """``V_{g,n} = c_{g,n}(0, ..., 0)``."""
    s = _sig(sig)
    return coeff(s, (0,) * s.n, table)


def vgn_or_zero(g: int, n: int, table: CoeffTable) -> PiPoly:
    """``V_{g,n}``, or zero when ``(g, n)`` is not a stable signature."""
    if not is_stable(g, n):
        return PiPoly.zero()
    return vgn(Signature(g, n), table)
