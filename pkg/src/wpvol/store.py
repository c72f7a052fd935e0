"""Coefficient table and its on-disk cache format.

A :class:`CoeffTable` maps canonical keys ``(g, n, alpha)`` (``alpha`` sorted
in descending order) to volume coefficients.  Each coefficient is a monomial
``r * pi^(2(3g-3+n-|alpha|))`` so only the rational ``r`` is held in memory.

Cache file format (UTF-8, LF)::

    WPVOL-CACHE 1 convention=paper
    0 3 | 0 0 0 | 0:1/1
    0 4 | 0 0 0 0 | 1:2/1
    ...
    #sha256 <hex digest of every preceding byte>

Data lines are sorted by ``(2g-2+n, g, n, alpha)``.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
import threading
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional

from .qpi import PiPoly

__all__ = [
    "CoeffTable",
    "CacheError",
    "FORMAT_VERSION",
    "CONVENTIONS",
    "save",
    "load",
    "dumps",
    "loads",
    "canonical",
    "alpha_keys",
    "count_alpha_keys",
]

FORMAT_VERSION = 1
CONVENTIONS = ("paper", "half")
_MAGIC = "WPVOL-CACHE"


class CacheError(ValueError):
    """Malformed, corrupted or incompatible cache file."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def canonical(alpha) -> tuple[int, ...]:
    return tuple(sorted(alpha, reverse=True))


def _partitions(total: int, parts: int, largest: int) -> Iterator[tuple[int, ...]]:
    # non-increasing sequences of exactly `parts` entries summing to `total`
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, largest), -1, -1):
        if first * parts < total:
            break
        for tail in _partitions(total - first, parts - 1, first):
            yield (first,) + tail


@lru_cache(maxsize=None)
def alpha_keys(g: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All canonical multi-indices with ``|alpha| <= 3g-3+n``, ordered by |alpha| then lex."""
    d = 3 * g - 3 + n
    keys = []
    for total in range(d + 1):
        keys.extend(sorted(_partitions(total, n, total)))
    return tuple(keys)


def count_alpha_keys(g: int, n: int) -> int:
    return len(alpha_keys(g, n))


class CoeffTable:
    """Memoized store of volume coefficients ``c_{g,n}(alpha)``.

    Reads are lock-free; insertion is serialized and idempotent (re-inserting
    an existing key with a different value is an error).
    """

    def __init__(self, convention: str = "paper"):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {convention!r}")
        self.convention = convention
        self.version = FORMAT_VERSION
        self._data: dict[tuple[int, int], dict[tuple[int, ...], Fraction]] = {}
        self._complete: set[tuple[int, int]] = set()
        self._lock = threading.RLock()
        self.computed = 0  # coefficients produced by the recursion in this process

    # access -----------------------------------------------------------
    def reduced(self, g: int, n: int, key: tuple[int, ...]) -> Optional[Fraction]:
        """Rational part of the coefficient under a canonical key, or None if absent."""
        sig = self._data.get((g, n))
        if sig is None:
            return None
        return sig.get(key)

    def get(self, g: int, n: int, alpha) -> Optional[PiPoly]:
        key = canonical(alpha)
        r = self.reduced(g, n, key)
        if r is None:
            return None
        return PiPoly.monomial(r, 3 * g - 3 + n - sum(key))

    def __contains__(self, item) -> bool:
        g, n, alpha = item
        return self.reduced(g, n, canonical(alpha)) is not None

    def signature_data(self, g: int, n: int) -> dict[tuple[int, ...], Fraction]:
        return self._data.get((g, n), {})

    def signatures(self) -> list[tuple[int, int]]:
        return sorted(self._data, key=lambda s: (2 * s[0] - 2 + s[1], s[0], s[1]))

    def is_complete(self, g: int, n: int) -> bool:
        return (g, n) in self._complete

    def complete_signatures(self) -> list[tuple[int, int]]:
        return sorted(self._complete, key=lambda s: (2 * s[0] - 2 + s[1], s[0], s[1]))

    def __len__(self) -> int:
        return sum(len(v) for v in self._data.values())

    def items(self) -> Iterator[tuple[tuple[int, int, tuple[int, ...]], PiPoly]]:
        """All entries in cache-file order."""
        for g, n in self.signatures():
            d = 3 * g - 3 + n
            for key in sorted(self._data[(g, n)]):
                yield (g, n, key), PiPoly.monomial(self._data[(g, n)][key], d - sum(key))

    def frontier(self) -> dict[int, int]:
        """For each n, the largest chi such that every (g, n) with 2g-2+n <= chi is complete."""
        out: dict[int, int] = {}
        for n in sorted({s[1] for s in self._complete}):
            g = 0 if n >= 3 else 1
            while (g, n) in self._complete:
                out[n] = 2 * g - 2 + n
                g += 1
        return out

    # mutation ---------------------------------------------------------
    def insert_signature(self, g: int, n: int, values: dict[tuple[int, ...], Fraction], computed: bool = True):
        """Insert a whole signature; existing entries must agree exactly."""
        with self._lock:
            sig = self._data.setdefault((g, n), {})
            for key, r in values.items():
                old = sig.get(key)
                if old is None:
                    sig[key] = r
                    if computed:
                        self.computed += 1
                elif old != r:
                    raise ValueError(f"conflicting value for {(g, n, key)}")
            if len(sig) == count_alpha_keys(g, n):
                self._complete.add((g, n))

    def insert(self, g: int, n: int, alpha, value: PiPoly):
        key = canonical(alpha)
        d = 3 * g - 3 + n - sum(key)
        _check_entry(g, n, key, value)
        self.insert_signature(g, n, {key: value.coeff(d)}, computed=False)


def _check_entry(g: int, n: int, key: tuple[int, ...], value: PiPoly, line: Optional[int] = None):
    if n < 1 or 2 * g - 2 + n <= 0 or g < 0:
        raise CacheError(f"unstable signature ({g}, {n})", line)
    if len(key) != n or any(a < 0 for a in key):
        raise CacheError(f"multi-index {key} does not match n={n}", line)
    if list(key) != sorted(key, reverse=True):
        raise CacheError(f"multi-index {key} is not in canonical (descending) order", line)
    d = 3 * g - 3 + n
    if sum(key) > d:
        raise CacheError(f"|alpha| = {sum(key)} exceeds 3g-3+n = {d}", line)
    if not value.is_monomial() or value.degree() != d - sum(key):
        raise CacheError(f"value {value} is not homogeneous of pi^2-degree {d - sum(key)}", line)
    if value.coeff(d - sum(key)) <= 0:
        raise CacheError(f"value {value} is not positive", line)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def dumps(table: CoeffTable) -> bytes:
    lines = [f"{_MAGIC} {FORMAT_VERSION} convention={table.convention}\n"]
    for (g, n, key), value in table.items():
        lines.append(f"{g} {n} | {' '.join(map(str, key))} | {value.cache_repr()}\n")
    body = "".join(lines).encode("utf-8")
    digest = hashlib.sha256(body).hexdigest()
    return body + f"#sha256 {digest}\n".encode("ascii")


def save(table: CoeffTable, destination) -> None:
    """Atomically write ``table`` to ``destination`` (temp file + rename)."""
    path = Path(destination)
    data = dumps(table)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def loads(data: bytes, convention: Optional[str] = None) -> CoeffTable:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CacheError(f"not valid UTF-8: {exc}") from None
    if not text.endswith("\n"):
        raise CacheError("missing trailing newline / checksum line")
    lines = text.split("\n")[:-1]
    if len(lines) < 2:
        raise CacheError("truncated cache file")
    footer = lines[-1]
    if not footer.startswith("#sha256 "):
        raise CacheError("missing checksum line", len(lines))
    body_len = len(data) - len(footer.encode("utf-8")) - 1
    expected = footer[len("#sha256 "):]
    if hashlib.sha256(data[:body_len]).hexdigest() != expected:
        raise CacheError("checksum mismatch", len(lines))

    header = lines[0].split(" ")
    if len(header) != 3 or header[0] != _MAGIC or not header[2].startswith("convention="):
        raise CacheError("bad header", 1)
    try:
        version = int(header[1])
    except ValueError:
        raise CacheError("bad version field", 1) from None
    if version != FORMAT_VERSION:
        raise CacheError(f"unsupported format version {version}", 1)
    file_conv = header[2][len("convention="):]
    if file_conv not in CONVENTIONS:
        raise CacheError(f"unknown convention {file_conv!r}", 1)
    if convention is not None and file_conv != convention:
        raise CacheError(f"cache convention {file_conv!r} does not match configured {convention!r}", 1)

    table = CoeffTable(file_conv)
    grouped: dict[tuple[int, int], dict[tuple[int, ...], Fraction]] = {}
    previous = None
    for lineno, line in enumerate(lines[1:-1], start=2):
        parts = line.split(" | ")
        if len(parts) != 3:
            raise CacheError("expected 'g n | alpha | terms'", lineno)
        try:
            g_txt, n_txt = parts[0].split(" ")
            g, n = int(g_txt), int(n_txt)
            key = tuple(int(a) for a in parts[1].split(" "))
        except ValueError:
            raise CacheError("malformed signature or multi-index", lineno) from None
        try:
            value = PiPoly.from_cache_repr(parts[2])
        except (ValueError, ZeroDivisionError) as exc:
            raise CacheError(f"malformed value: {exc}", lineno) from None
        _check_entry(g, n, key, value, lineno)
        order = (2 * g - 2 + n, g, n, key)
        if previous is not None and order <= previous:
            raise CacheError("entries out of order or duplicated", lineno)
        previous = order
        grouped.setdefault((g, n), {})[key] = value.coeff(3 * g - 3 + n - sum(key))
    for (g, n), values in grouped.items():
        table.insert_signature(g, n, values, computed=False)
    return table


def load(source, convention: Optional[str] = None) -> CoeffTable:
    """Read and verify a cache file; ``convention`` (if given) must match the header."""
    return loads(Path(source).read_bytes(), convention)
