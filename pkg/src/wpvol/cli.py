"""Command-line front end: ``wpvol {fill,eval,residuals,check,lambda}``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from . import asymptotics as asy
from . import checks
from . import discrete as dsc
from .recursion import ensure, fill, is_stable
from .store import CONVENTIONS, CacheError, CoeffTable, load, save

log = logging.getLogger("wpvol")

CSV_HEADER = ("g", "n", "x", "exact_ratio", "F0", "F1", "FN", "R0", "R1", "RN")
ENV_CACHE = "WPVOL_CACHE"


class UsageError(Exception):
    """Invalid command-line input; reported on stderr with exit status 2."""


# ---------------------------------------------------------------------------
# configuration and cache
# ---------------------------------------------------------------------------

def default_cache_path(convention: str) -> Path:
    env = os.environ.get(ENV_CACHE)
    if env:
        return Path(env)
    base = Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache"))
    return base / "wpvol" / f"coefficients-{convention}.txt"


class Session:
    """A coefficient table bound to an optional cache file."""

    def __init__(self, args: argparse.Namespace):
        self.convention = args.convention
        self.path: Optional[Path] = None if args.no_cache else Path(args.cache) if args.cache else default_cache_path(args.convention)
        self.loaded = 0
        if self.path is not None and self.path.exists():
            self.table = load(self.path, self.convention)
            self.loaded = len(self.table)
        else:
            self.table = CoeffTable(self.convention)

    def persist(self) -> bool:
        """Write the cache when new coefficients were computed (or the file is missing)."""
        if self.path is None:
            return False
        if self.table.computed == 0 and self.path.exists():
            return False
        self.path.parent.mkdir(parents=True, exist_ok=True)
        save(self.table, self.path)
        return True


def _parse_number(text: str):
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return mpmath.mpf(text)
    except (ValueError, TypeError):
        raise UsageError(f"cannot parse length {text!r}") from None


def _parse_vector(text: str) -> tuple:
    if text.strip() == "":
        return ()
    return tuple(_parse_number(t) for t in text.split(","))


def _digits(precision: int) -> int:
    return max(15, int(precision * 0.30103) - 2)


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_fill(args, session: Session, out) -> int:
    start = time.perf_counter()
    new = fill(session.table, args.chi_max, args.n_max, workers=args.threads)
    elapsed = time.perf_counter() - start
    written = session.persist()
    table = session.table
    print(f"convention: {table.convention}", file=out)
    print(f"signatures: {len(table.complete_signatures())} complete ({len(new)} new)", file=out)
    print(f"coefficients: {len(table)} total, {table.computed} computed, {session.loaded} loaded from cache", file=out)
    print(f"time: {elapsed:.3f} s", file=out)
    if session.path is None:
        print("cache: disabled", file=out)
    else:
        print(f"cache: {session.path} ({'written' if written else 'unchanged'})", file=out)
    return 0


def cmd_eval(args, session: Session, out) -> int:
    g, n = args.g, args.n
    if not is_stable(g, n):
        raise UsageError(f"(g, n) = ({g}, {n}) is not a stable signature")
    x = _parse_vector(args.x) if args.x is not None else (Fraction(0),) * n
    if len(x) == 1 and n > 1:
        x = x * n
    if len(x) != n:
        raise UsageError(f"expected {n} lengths, got {len(x)}")
    ensure((g, n), session.table)
    digits = _digits(args.precision)
    with mp.workprec(args.precision):
        if all(isinstance(v, Fraction) for v in x):
            exact = asy.eval_volume_exact((g, n), x, session.table)
            print(str(exact), file=out)
            print(f"exact: {exact.cache_repr()}", file=out)
            print(f"value: {mpmath.nstr(exact.to_mpf(args.precision), digits)}", file=out)
        else:
            enc = asy.eval_volume((g, n), x, session.table, args.precision)
            print(f"value: {mpmath.nstr(enc.mid(), digits)} +/- {mpmath.nstr(enc.width(), 3)}", file=out)
        ratio = asy.volume_ratio((g, n), x, session.table, args.precision)
        print(f"ratio: {mpmath.nstr(ratio.mid(), digits)}", file=out)
    session.persist()
    return 0


def residual_rows(table: CoeffTable, g_values, n: int, grid, N: int, a: Optional[int], precision: int):
    """One CSV row per (g, grid point); empty fields where a residual is undefined."""
    digits = _digits(precision)
    rows = []
    for g in g_values:
        if not is_stable(g, n):
            continue
        ensure((g, n), table)
        approx = dsc.build_FN((g, n), N, a, table)
        for x in asy.grid_points(n, grid):
            with mp.workprec(precision):
                ratio = asy.volume_ratio((g, n), x, table, precision).mid()
                f0 = asy.F0((g, n), x, precision)
                f1 = asy.F1((g, n), x, table, precision)
                fn = approx(x, precision)
                r0 = None if sum(x) == 0 else asy.normalized_residual(ratio, f0, g, x, 0)
                r1 = asy.normalized_residual(ratio, f1, g, x, 1)
                rn = asy.normalized_residual(ratio, fn, g, x, N)
            rows.append(
                [str(g), str(n), ";".join(str(v) for v in x)]
                + [mpmath.nstr(v, digits) if v is not None else "" for v in (ratio, f0, f1, fn, r0, r1, rn)]
            )
    return rows


def cmd_residuals(args, session: Session, out) -> int:
    if args.g_min > args.g_max:
        raise UsageError("empty genus range")
    grid = _parse_vector(args.grid) if args.grid else asy.X_GRID
    if not grid:
        raise UsageError("empty grid")
    rows = residual_rows(session.table, range(args.g_min, args.g_max + 1), args.n, grid, args.order, args.a, args.precision)
    if not rows:
        raise UsageError("no stable signatures in the requested range")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    session.persist()
    return 0


def cmd_check(args, session: Session, out) -> int:
    names = checks.SUITES if args.suite == "all" else (args.suite,)
    cfg = checks.CheckConfig(
        g_min=args.g_min,
        g_max=args.g_max,
        N=args.order,
        a=args.a,
        precision=args.precision,
        conv_g=(4, args.conv_g_max),
    )
    checks.prepare(session.table, cfg, args.chi_max, args.n_max)
    session.persist()
    results = checks.run_suites(names, session.table, cfg)
    for res in results:
        print(res.report(), file=out)
    ok = all(r.passed for r in results)
    print(f"overall: {'PASS' if ok else 'FAIL'} ({sum(r.passed for r in results)}/{len(results)} suites)", file=out)
    return 0 if ok else 1


def cmd_lambda(args, session: Optional[Session], out) -> int:
    try:
        value, bound = asy.lambda_intensity(_parse_number(args.a), _parse_number(args.b), args.precision)
    except ValueError as exc:
        raise UsageError(f"invalid interval: {exc}") from None
    digits = _digits(args.precision)
    print(f"lambda: {mpmath.nstr(value, digits)}", file=out)
    print(f"bound: {mpmath.nstr(bound, 3)}", file=out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _precision(text: str) -> int:
    value = int(text)
    if value < 64:
        raise argparse.ArgumentTypeError("precision must be at least 64 bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so that a
    # flag given before the subcommand name is not overwritten
    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", default=default(None), help=f"cache file (default: ${ENV_CACHE} or a per-user cache file)")
    common.add_argument("--no-cache", action="store_true", default=default(False), help="keep the table in memory only")
    common.add_argument("--precision", type=_precision, default=default(128), help="working precision in bits (>= 64)")
    common.add_argument("--convention", choices=CONVENTIONS, default=default("paper"), help="base-case convention for V_{1,1}")
    common.add_argument("--threads", type=_positive, default=default(1), help="worker processes for table filling")
    common.add_argument("--out", default=default(None), help="write the report to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", default=default(False), help="log progress to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options(suppress=True)
    parser = argparse.ArgumentParser(prog="wpvol", description="Weil-Petersson volume coefficients and their large-genus asymptotics.", parents=[_global_options(suppress=False)])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fill", parents=[common], help="compute all coefficients up to a given |chi| and n")
    p.add_argument("--chi-max", type=_positive, required=True)
    p.add_argument("--n-max", type=_positive, required=True)
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("eval", parents=[common], help="evaluate V_{g,n}(x) and V_{g,n}(x)/V_{g,n}")
    p.add_argument("--g", type=_nonneg, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--x", help="comma-separated boundary lengths (rational or decimal); default all zero")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("residuals", parents=[common], help="CSV of ratios, approximants and normalized residuals")
    p.add_argument("--g-min", type=_nonneg, default=2)
    p.add_argument("--g-max", type=_nonneg, default=8)
    p.add_argument("--n", type=_positive, default=1)
    p.add_argument("--grid", help="comma-separated grid values (default 1/4,1/2,1,2,4,8)")
    p.add_argument("--order", type=_nonneg, default=1, help="order N of the constructive approximant FN")
    p.add_argument("--a", type=_nonneg, default=None, help="shift threshold of FN (default 2N+2)")
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("check", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=("all",) + checks.SUITES, default="all")
    p.add_argument("--g-min", type=_nonneg, default=2)
    p.add_argument("--g-max", type=_nonneg, default=8)
    p.add_argument("--order", type=_nonneg, default=1, help="order N used by the residual suite")
    p.add_argument("--a", type=_nonneg, default=None)
    p.add_argument("--chi-max", type=_positive, default=12, help="desk-scale block for the exact suites")
    p.add_argument("--n-max", type=_positive, default=5)
    p.add_argument("--conv-g-max", type=_positive, default=12, help="largest genus of the second-order convergence check")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lambda", parents=[common], help="Poisson intensity of lengths in [a, b]")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_lambda)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        session = None if args.command == "lambda" else Session(args)
        if args.out:
            buffer = io.StringIO()
            code = args.func(args, session, buffer)
            with _output(args.out) as fh:
                fh.write(buffer.getvalue())
            return code
        return args.func(args, session, sys.stdout)
    except CacheError as exc:
        print(f"wpvol: cache error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"wpvol: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
