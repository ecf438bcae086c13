"""Shared fixtures plus the acceptance summary: one pass/fail line per
acceptance criterion at the end of the run."""

import re

import pytest

from slantkit.gallery import build_fixture

CRITERIA = {
    "c1": "gallery angle reproduction (constant case)",
    "c2": "gallery slant-function reproduction (pointwise case)",
    "c3": "classification claims and verdict lattice",
    "c4": "duality round-trips and spans",
    "c5": "identity suite completeness and sensitivity",
    "c6": "connection criteria",
    "c7": "property suite and determinism",
    "c8": "expression parser corpus",
}

_NOTES = {
    "c3": ("only the ex8 'pointwise-k-slant iff gamma>0' leg fails: ex8's closed "
           "forms keep the slant values separated at every point for every "
           "gamma >= 0 (it loses genericity at gamma=0, asserted separately and "
           "passing); every other leg passes"),
}

_results: dict[str, dict] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    m = re.search(r"::test_(c\d+)", report.nodeid)
    if not m:
        return
    crit = m.group(1)
    entry = _results.setdefault(crit, {"passed": 0, "failed": 0})
    if report.passed:
        entry["passed"] += 1
    elif report.failed:
        entry["failed"] += 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    tw = terminalreporter
    tw.write_sep("=", "acceptance criteria")
    for crit in sorted(CRITERIA):
        if crit not in _results:
            continue
        entry = _results[crit]
        status = "PASS" if entry["failed"] == 0 else "FAIL"
        line = f"ACCEPTANCE {crit.upper()} ({CRITERIA[crit]}): {status}"
        if status == "FAIL" and crit in _NOTES:
            line += f"  [{_NOTES[crit]}]"
        tw.write_line(line)


@pytest.fixture(scope="session")
def ex1():
    return build_fixture("ex1", k=2, epsilon=-1)


@pytest.fixture(scope="session")
def ex1_plus():
    return build_fixture("ex1", k=2, epsilon=1)


@pytest.fixture(scope="session")
def ex3():
    return build_fixture("ex3", k=2, epsilon=-1)


@pytest.fixture(scope="session")
def ex4_zero():
    return build_fixture("ex4", k=2, epsilon=-1, gamma=0.0, delta=1.0)


@pytest.fixture(scope="session")
def ex5_one():
    return build_fixture("ex5", k=2, epsilon=1, gamma=1.0)
