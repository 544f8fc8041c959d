import os

import pytest
from hypothesis import HealthCheck, settings

from dfnoma import SystemConfig, derive_budget

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

WORKERS = max(1, min(4, os.cpu_count() or 1))

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance (sub)criterion."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        _VERDICTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture
def fig2_cfg():
    return SystemConfig(alpha1=0.9, beta1=0.2, d_sr=5, d_r1=1, d_r2=3, xi_r_db=-10)


@pytest.fixture
def symmetric_cfg():
    return SystemConfig(alpha1=0.9, beta1=0.1, d_sr=5, d_r1=2, d_r2=2, xi_r_db=-10)


@pytest.fixture
def budget_of():
    return derive_budget
