from __future__ import annotations

import pytest

from pmwnet.scenarios import builtin_scenario


@pytest.fixture(scope="session")
def fusion():
    return builtin_scenario("fusion")


@pytest.fixture(scope="session")
def general():
    return builtin_scenario("general")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
