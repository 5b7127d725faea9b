"""Shared fixtures and the acceptance summary banner."""

import numpy as np
import pytest

from subnetsim.config import RunConfig
from subnetsim.cqi import CqiConfig

# One line per acceptance criterion, appended by tests/test_acceptance.py and
# echoed after the run so the verdicts are readable without scrolling.
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_cfg():
    """A config small enough for CLI and runner round trips in well under a second.

    The fixed quantizer anchor skips the calibration pass.
    """
    return RunConfig(seed=7, n_ttis=40, warmup_ttis=10, cqi=CqiConfig(sinr_min_db=-10.0))
