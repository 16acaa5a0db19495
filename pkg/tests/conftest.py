from __future__ import annotations

import os
import random
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

SEED = int(os.environ.get("FCA_SEED", "20240611"))

settings.register_profile(
    "fca", max_examples=60, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fca")

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(SEED)


@pytest.fixture
def np_rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = getattr(report, "acceptance", None)
    for key, value in report.user_properties:
        if key == "acceptance":
            marker = value
    if marker is None:
        return
    number, title = marker
    _ACCEPTANCE[number] = ("PASS" if report.passed else "FAIL", title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.user_properties.append(("acceptance", (mark.args[0], mark.args[1])))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} criterion {number:2d}: {title}")
