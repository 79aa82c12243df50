import os
from collections import defaultdict

import pytest

from shortsmooth.zeros import load_zeros

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
ZEROS_PATH = os.environ.get("SHORTSMOOTH_ZEROS", os.path.join(ROOT, "data", "zeros.txt"))

_criteria: dict[int, dict] = defaultdict(lambda: {"name": "", "passed": 0, "failed": 0, "seconds": 0.0})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, name): acceptance criterion this test belongs to")


@pytest.fixture(scope="session")
def zeros():
    return load_zeros(ZEROS_PATH)


def pytest_runtest_logreport(report):
    marks = getattr(report, "_criterion", None)
    if marks is None:
        return
    n, name = marks
    entry = _criteria[n]
    entry["name"] = name
    entry["seconds"] += report.duration
    if report.when == "call" or report.outcome == "failed":
        if report.outcome == "passed":
            entry["passed"] += 1
        elif report.outcome == "failed":
            entry["failed"] += 1


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep._criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        e = _criteria[n]
        status = "PASS" if e["failed"] == 0 and e["passed"] > 0 else "FAIL"
        terminalreporter.write_line(
            f"criterion {n} [{e['name']}]: {status} "
            f"({e['passed']} passed, {e['failed']} failed, {e['seconds']:.1f}s)")
