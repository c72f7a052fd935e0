"""Persisting a coefficient table and running verification suites on it.

Run with ``python3 demos/04_cache_and_checks.py``.  Fills a moderate table in
parallel, saves it to a temporary cache file, reloads it (no recomputation),
and runs the exact and ratio suites on a reduced genus range.  The one
failing line is the small-index bound on the scaled gaps of ``u_i``, which
rise towards 3/4 past index 5.
"""

from __future__ import annotations

import tempfile
import time
from pathlib import Path

from wpvol import CoeffTable, fill, load, save
from wpvol import checks


def main() -> None:
    table = CoeffTable("half")
    start = time.perf_counter()
    fill(table, 8, 4, workers=2)
    print(f"filled {len(table)} coefficients in {time.perf_counter() - start:.2f} s")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "coefficients-half.txt"
        save(table, path)
        print(f"saved {path.stat().st_size} bytes; last line: {path.read_text().splitlines()[-1][:24]}...")
        warm = load(path, "half")
        fill(warm, 8, 4)
        print(f"reloaded {len(warm)} coefficients, recomputed {warm.computed}")

    cfg = checks.CheckConfig(g_min=2, g_max=4, conv_g=(4, 6))
    for res in checks.run_suites(["exact", "ratios"], warm, cfg):
        failed = [text for ok, text in res.lines if not ok]
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {len(res.lines) - len(failed)}/{len(res.lines)} checks")
        for text in failed:
            print(f"    failing: {text}")


if __name__ == "__main__":
    main()
