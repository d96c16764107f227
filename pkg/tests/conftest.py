import time

import pytest

from ramseychi.graph import corpus

from .acceptance_log import ACCEPTANCE

_START = time.monotonic()
FULL_SUITE_LIMIT = 15 * 60


@pytest.fixture(scope="session")
def corpus7():
    return list(corpus(7))


@pytest.fixture(scope="session")
def corpus8():
    return list(corpus(8))


def pytest_terminal_summary(terminalreporter):
    elapsed = time.monotonic() - _START
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0])):
        tr.write_line(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    ok = elapsed <= FULL_SUITE_LIMIT
    tr.write_line(f"ACCEPTANCE 10 (full suite): {'PASS' if ok else 'FAIL'} "
                  f"(wall-clock {elapsed:.1f}s, limit {FULL_SUITE_LIMIT}s)")


def pytest_sessionfinish(session, exitstatus):
    if ACCEPTANCE and time.monotonic() - _START > FULL_SUITE_LIMIT and exitstatus == 0:
        session.exitstatus = 1
