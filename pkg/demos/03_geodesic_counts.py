"""Short closed geodesics on a random surface of large genus.

Run with ``python3 demos/03_geodesic_counts.py``.  In the large-genus limit
the number of primitive closed geodesics with length in ``[a, b]`` is Poisson
with intensity ``lambda = int_a^b (2/x) sinh(x/2)^2 dx``.  The intensity is
computed by quadrature with a certified bound from an independent series.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from wpvol.asymptotics import lambda_intensity


def main() -> None:
    print(f"{'window':>12} {'lambda':>14} {'P(none)':>10} {'P(one)':>10} {'bound':>9}")
    for a, b in [(0, 1), (0, 2), (1, 2), (2, 3), (0, 4), (Fraction(1, 2), 5)]:
        lam, bound = lambda_intensity(a, b)
        p0 = mpmath.exp(-lam)
        print(f"{f'[{a}, {b}]':>12} {mpmath.nstr(lam, 10):>14} {mpmath.nstr(p0, 6):>10} "
              f"{mpmath.nstr(lam * p0, 6):>10} {mpmath.nstr(bound, 2):>9}")

    # the systole exceeds L with probability exp(-lambda_{0,L}); find the median systole
    with mpmath.workprec(128):
        median = mpmath.findroot(lambda L: lambda_intensity(0, L)[0] - mpmath.log(2), 1.5)
    print(f"\nMedian systole in the limit: {mpmath.nstr(median, 8)}")


if __name__ == "__main__":
    main()
