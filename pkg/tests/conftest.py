import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")

from strongcoord.factors import desk_instance  # noqa: E402


@pytest.fixture
def desk():
    return desk_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria: one PASS/FAIL line each in the terminal summary
_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    k = mark.args[0]
    detail = dict(item.user_properties).get("detail", "")
    verdict = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    _criteria[k] = (verdict, item.name, f"{detail} [{rep.duration:.1f}s]")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        verdict, name, detail = _criteria[k]
        terminalreporter.write_line(f"criterion {k}: {verdict} {name} {detail}")
