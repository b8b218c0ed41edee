"""Shared fixtures, the hypothesis profile and the acceptance summary."""

import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rig_lab.model import ModelParams

settings.register_profile("rig", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("rig")

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


@pytest.fixture
def p14():
    return ModelParams(1.0, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion, with the measured values."""
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            detail = "; ".join(v for k, v in getattr(rep, "user_properties", []) if k == "detail")
            lines[int(m.group(1))] = f"criterion {m.group(1)}: {'PASS' if outcome == 'passed' else 'FAIL'}" \
                                     + (f"  {detail}" if detail else "")
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
