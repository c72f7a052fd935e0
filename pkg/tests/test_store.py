from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wpvol import CoeffTable, PiPoly, fill
from wpvol.store import CacheError, alpha_keys, canonical, count_alpha_keys, dumps, load, loads, save


@pytest.fixture(scope="module")
def table() -> CoeffTable:
    t = CoeffTable("paper")
    fill(t, 5, 4)
    return t


def _brute_keys(g, n):
    from itertools import product

    d = 3 * g - 3 + n
    return {canonical(a) for a in product(range(d + 1), repeat=n) if sum(a) <= d}


@pytest.mark.parametrize("g, n", [(0, 3), (0, 5), (1, 1), (1, 3), (2, 2), (3, 1)])
def test_alpha_keys_enumerates_canonical_multi_indices(g, n):
    keys = alpha_keys(g, n)
    assert len(keys) == len(set(keys)) == count_alpha_keys(g, n)
    assert set(keys) == _brute_keys(g, n)
    assert all(list(k) == sorted(k, reverse=True) for k in keys)


def test_header_and_first_lines(table):
    text = dumps(table).decode()
    lines = text.splitlines()
    assert lines[0] == "WPVOL-CACHE 1 convention=paper"
    assert lines[1] == "0 3 | 0 0 0 | 0:1/1"
    assert lines[2] == "1 1 | 0 | 1:1/6"
    assert lines[3] == "1 1 | 1 | 0:1/1"
    assert lines[-1].startswith("#sha256 ")


def test_round_trip_is_byte_identical(table, tmp_path):
    path = tmp_path / "c.txt"
    save(table, path)
    again = load(path)
    assert dumps(again) == path.read_bytes()
    assert dict(again.items()) == dict(table.items())
    assert again.computed == 0
    assert set(again.complete_signatures()) == set(table.complete_signatures())


def test_every_single_byte_corruption_is_rejected(table):
    small = CoeffTable("paper")
    fill(small, 3, 3)
    data = dumps(small)
    for i in range(len(data)):
        for flip in (0x01, 0x20):
            corrupted = bytearray(data)
            corrupted[i] ^= flip
            with pytest.raises(CacheError):
                loads(bytes(corrupted))


def test_truncation_is_rejected(table):
    data = dumps(table)
    for cut in (0, 10, len(data) // 2, len(data) - 1):
        with pytest.raises(CacheError):
            loads(data[:cut])


def test_convention_mismatch(table):
    with pytest.raises(CacheError, match="convention"):
        loads(dumps(table), convention="half")


def _rehash(body: str) -> bytes:
    import hashlib

    raw = body.encode()
    return raw + f"#sha256 {hashlib.sha256(raw).hexdigest()}\n".encode()


@pytest.mark.parametrize(
    "line, message",
    [
        ("0 3 | 0 0 0 | 0:-1/1", "positive"),
        ("0 3 | 0 0 1 | 0:1/1", "canonical"),
        ("0 3 | 1 0 0 | 0:1/1", "exceeds"),
        ("0 3 | 0 0 0 | 1:1/1", "homogeneous"),
        ("0 2 | 0 0 | 0:1/1", "unstable"),
        ("0 3 | 0 0 0", "expected"),
    ],
)
def test_malformed_lines_report_line_number(line, message):
    body = f"WPVOL-CACHE 1 convention=paper\n{line}\n"
    with pytest.raises(CacheError, match=message) as info:
        loads(_rehash(body))
    assert info.value.line == 2


def test_out_of_order_entries_rejected():
    body = "WPVOL-CACHE 1 convention=paper\n1 1 | 0 | 1:1/6\n0 3 | 0 0 0 | 0:1/1\n"
    with pytest.raises(CacheError, match="order"):
        loads(_rehash(body))


def test_version_mismatch():
    with pytest.raises(CacheError, match="version"):
        loads(_rehash("WPVOL-CACHE 2 convention=paper\n"))


def test_conflicting_insert_rejected():
    t = CoeffTable("paper")
    t.insert(0, 3, (0, 0, 0), PiPoly(1))
    t.insert(0, 3, (0, 0, 0), PiPoly(1))
    with pytest.raises(ValueError):
        t.insert(0, 3, (0, 0, 0), PiPoly(2))


@given(st.permutations([2, 1, 0, 0]))
def test_lookup_is_permutation_invariant(alpha):
    t = CoeffTable("paper")
    fill(t, 4, 4)
    assert t.get(1, 4, alpha) == t.get(1, 4, (2, 1, 0, 0))
    assert (1, 4, tuple(alpha)) in t


def test_frontier(table):
    assert table.frontier()[1] == 5
    assert table.frontier()[4] == 4


def test_interrupted_save_keeps_previous_file(table, tmp_path, monkeypatch):
    path = tmp_path / "c.txt"
    save(table, path)
    before = path.read_bytes()

    def boom(*args, **kwargs):
        raise KeyboardInterrupt

    monkeypatch.setattr("os.replace", boom)
    bigger = CoeffTable("paper")
    fill(bigger, 6, 4)
    with pytest.raises(KeyboardInterrupt):
        save(bigger, path)
    assert path.read_bytes() == before
    assert [p.name for p in tmp_path.iterdir()] == ["c.txt"]


def test_reduced_value_lookup(table):
    assert table.reduced(1, 1, (0,)) == Fraction(1, 6)
    assert table.reduced(9, 1, (0,)) is None
