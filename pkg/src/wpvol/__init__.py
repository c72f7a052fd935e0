"""Exact Weil-Petersson volume coefficients and numerical checks of their large-genus asymptotics."""

from __future__ import annotations

from .qpi import Interval, PiPoly, UndecidedComparison, compare, pi_interval, u, zeta_even
from .recursion import Signature, coeff, ensure, fill, volume_poly, vgn
from .store import CacheError, CoeffTable, load, save

__all__ = [
    "CacheError",
    "CoeffTable",
    "Interval",
    "PiPoly",
    "Signature",
    "UndecidedComparison",
    "coeff",
    "compare",
    "ensure",
    "fill",
    "load",
    "pi_interval",
    "save",
    "u",
    "vgn",
    "volume_poly",
    "zeta_even",
]

__version__ = "0.1.0"
