from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "superquadric degree-2 covering transitions (< 1 s)",
    2: "1|0 projection table pr_0..pr_6",
    3: "0|2 lift double-sum formula",
    4: "functoriality on 50 random composable morphisms (< 30 s)",
    5: "omega_P2 equals omega_2",
    6: "Donagi-Witten matrix cocycle and extension class",
    7: "odd-dimension-2 reconstruction round trip",
    8: "injectivity of the lift at k = 2, failure at k = 1",
    9: "loop superalgebra of gl(1|1)",
    10: "algebra kernel properties and log/exp round trips",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(n, []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        res = _outcomes.get(n)
        if res is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(res) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title}")
