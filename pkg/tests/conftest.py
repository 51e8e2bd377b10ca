import time

import numpy as np
import pytest

SUITE_BUDGET_S = 300.0

ACCEPTANCE_LINES: list[str] = []
_session = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def report():
    """Record one acceptance line; the terminal summary prints them all."""

    def _report(criterion: str, passed: bool, detail: str) -> None:
        line = f"[{criterion}] {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_sessionstart(session):
    _session["start"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _session["start"]
    _session["elapsed"] = elapsed
    if elapsed > SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    elapsed = _session.get("elapsed", time.perf_counter() - _session["start"])
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    ok = elapsed <= SUITE_BUDGET_S
    terminalreporter.write_line(
        f"[10b] {'PASS' if ok else 'FAIL'}  test session took {elapsed:.1f}s "
        f"(budget {SUITE_BUDGET_S:.0f}s)"
    )
