import numpy as np
import pytest

from pstlab import hypercube, switched_hypercube
from pstlab.switching import switched_q4

_acceptance: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if marker:
        _acceptance.setdefault(marker, []).append(report.outcome)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m:
            item.user_properties.append(("acceptance", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: int(k.split()[0])):
        outcomes = _acceptance[key]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"[{status}] AC{key} ({outcomes.count('passed')}/{len(outcomes)} checks)")


@pytest.fixture(scope="session")
def q4():
    return hypercube(4)


@pytest.fixture(scope="session")
def sq4():
    return switched_q4()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20261019)
