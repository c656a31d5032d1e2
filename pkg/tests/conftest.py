import random

import pytest

from limhodge import instances

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def hs1():
    return instances.hashimoto_sano_instance(1)


@pytest.fixture(scope="session")
def conifold():
    return instances.conifold_instance()


@pytest.fixture(scope="session")
def toy():
    return instances.toy_instance()


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        n = int(name.split("_")[2])
        ok = report.outcome == "passed" and _ACCEPTANCE.get(n, "PASS") == "PASS"
        _ACCEPTANCE[n] = "PASS" if ok else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {_ACCEPTANCE[n]}")
