"""How the normalized volume approaches its large-genus profile.

Run with ``python3 demos/02_large_genus.py`` (about ten seconds).  For one
boundary of length 2 the ratio ``V_{g,1}(x)/V_{g,1}`` is compared with the
leading profile ``F0``, the first-order approximant ``F1`` and the
constructive approximant ``F2``.  The first two gaps shrink like ``1/g`` and
``1/g^2``.  ``F2`` reproduces every coefficient below its threshold exactly,
so at this moderate length its error sits far below both.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from wpvol import CoeffTable, ensure, vgn
from wpvol import asymptotics as asy
from wpvol import discrete as dsc
from wpvol.checks import convergence_gaps


def main() -> None:
    with mpmath.workprec(128):
        run()


def run() -> None:
    table = CoeffTable("paper")
    x = (Fraction(2),)
    print(f"x = {x[0]}:  ratio = V_g,1(x)/V_g,1")
    print(f"{'g':>3} {'ratio':>14} {'ratio-F0':>12} {'ratio-F1':>12} {'ratio-F2':>12}")
    for g in range(2, 11):
        ensure((g, 1), table)
        ratio = asy.volume_ratio((g, 1), x, table).mid()
        f0 = asy.F0((g, 1), x)
        f1 = asy.F1((g, 1), x, table)
        f2 = dsc.build_FN((g, 1), 2, None, table)(x)
        print(f"{g:>3} {mpmath.nstr(ratio, 10):>14} {mpmath.nstr(ratio - f0, 3):>12} "
              f"{mpmath.nstr(ratio - f1, 3):>12} {mpmath.nstr(ratio - f2, 3):>12}")

    print("\nThe first-order coefficient: g (ratio - F0) approaches a g-free limit f1(x)")
    gaps = convergence_gaps(table, range(4, 11), x[0])
    for g, gap in gaps.items():
        print(f"  g={g:>2}: |g (ratio - F0) - f1| = {mpmath.nstr(gap, 5)}")

    print("\nThe cusp ratio (2g-2+n) V_g,n / V_g,n+1 at n = 1 tends to 1/(4 pi^2) ~ 0.02533")
    for g in range(2, 9):
        ensure((g, 2), table)
        value = (2 * g - 1) * vgn((g, 1), table).to_mpf() / vgn((g, 2), table).to_mpf()
        print(f"  g={g}: {mpmath.nstr(value, 8)}")


if __name__ == "__main__":
    main()
