import json
from pathlib import Path

import pytest

from gqe.datasets import load_social_network, social_network_path

CRITERIA = {
    1: "fixture reconstruction",
    2: "unwind query rows",
    3: "two-part query with optional match",
    4: "golden plans",
    5: "distinct/sort/skip/limit semantics",
    6: "grouping criteria table",
    7: "algebraic property suites",
    8: "differential oracle",
    9: "union schema enforcement",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes.setdefault(marker.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n} ({title}): {status}")


@pytest.fixture(scope="session")
def social():
    return load_social_network()


@pytest.fixture(scope="session")
def social_raw():
    return json.loads(social_network_path().read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def golden_dir():
    return Path(__file__).parent / "golden"
