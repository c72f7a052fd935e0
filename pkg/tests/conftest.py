from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

from wpvol import CoeffTable, fill
from wpvol.checks import CheckConfig, prepare

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_paper() -> CoeffTable:
    table = CoeffTable("paper")
    fill(table, 8, 5)
    return table


@pytest.fixture(scope="session")
def small_half() -> CoeffTable:
    table = CoeffTable("half")
    fill(table, 8, 5)
    return table


@pytest.fixture(scope="session")
def check_config() -> CheckConfig:
    return CheckConfig()


@pytest.fixture(scope="session")
def desk_table(check_config) -> CoeffTable:
    """All |chi| <= 12, n <= 5; n = 1, 2 up to genus 8; V_{g,1} up to genus 12."""
    table = CoeffTable("paper")
    prepare(table, check_config)
    return table


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_lines() -> dict[int, str]:
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
