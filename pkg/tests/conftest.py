import functools

import pytest

from transgress.fixtures import builtin

# acceptance results, filled by test_acceptance and printed at the end
ACCEPTANCE: dict = {}


@functools.lru_cache(maxsize=None)
def cached_fixture(name: str):
    return builtin(name)


@pytest.fixture(scope="session")
def rp2():
    return cached_fixture("rp2_minimal")


@pytest.fixture(scope="session")
def rp3():
    return cached_fixture("rp3_join")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {line}")
