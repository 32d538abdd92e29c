import pytest

from toposites import fixtures
from toposites.topology import saturate, trivial_topology


@pytest.fixture
def arrow():
    return fixtures.arrow()


@pytest.fixture
def Jb(arrow):
    # {u} covers b
    return saturate(arrow, {"b": [["u"]]})


@pytest.fixture
def one_degenerate():
    C = fixtures.one()
    return C, saturate(C, {"*": [[]]})


def trivial(make):
    C = make()
    return C, trivial_topology(C)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
