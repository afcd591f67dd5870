from __future__ import annotations

import re

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("suite", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


@pytest.fixture
def simple():
    from oracles import simple_patch_sets

    return simple_patch_sets()


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in order."""
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", getattr(rep, "nodeid", ""))
            if m and (rep.when == "call" or outcome == "error"):
                lines[int(m.group(1))] = (m.group(2).replace("_", " "), "PASS" if outcome == "passed" else "FAIL")
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            name, status = lines[n]
            terminalreporter.write_line(f"criterion {n:2d} [PRIMARY] {name}: {status}")
