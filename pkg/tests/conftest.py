from __future__ import annotations

import pytest

from sted.tree import DEFAULT_MAX_DEPTH, ensure_recursion_headroom
from sted.variation import gen_base_document, sample_base_specs

# raise the limit once up front so hypothesis does not see it change mid-test
ensure_recursion_headroom(DEFAULT_MAX_DEPTH)

# criterion number -> (title, passed)
ACCEPTANCE: dict[int, tuple[str, bool]] = {}
_CRITERIA: dict[str, tuple[int, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[item.nodeid] = (m.args[0], m.args[1])


def pytest_runtest_logreport(report):
    crit = _CRITERIA.get(report.nodeid)
    if crit is None:
        return
    if report.when == "call" or report.failed:
        num, title = crit
        prev = ACCEPTANCE.get(num)
        ok = report.passed and (prev is None or prev[1])
        ACCEPTANCE[num] = (title, ok)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[num]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {title}")


@pytest.fixture(scope="session")
def corpus75():
    """75 base documents drawn like the reference set, fixed seed."""
    specs = sample_base_specs(75, 2024)
    return specs, [gen_base_document(s) for s in specs]


@pytest.fixture(scope="session")
def docs200():
    specs = sample_base_specs(200, 77)
    return [gen_base_document(s) for s in specs]
