import pytest

from geomva import build_model
from geomva.geometric import GeometricStructure


@pytest.fixture(scope="session")
def fb():
    return build_model("free_boson")


@pytest.fixture(scope="session")
def comm():
    return build_model("commutative")


@pytest.fixture(scope="session")
def triv():
    return build_model("trivial")


@pytest.fixture(scope="session")
def G_fb(fb):
    return GeometricStructure(fb)


@pytest.fixture(scope="session")
def G_comm(comm):
    return GeometricStructure(comm)


@pytest.fixture(scope="session")
def b(fb):
    return fb.basis.vector((1,))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
