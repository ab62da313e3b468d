import pytest

from sirrd.kinetics import PAPER_PARAMS, Params


@pytest.fixture
def paper():
    return PAPER_PARAMS


@pytest.fixture
def endemic():
    # b=2, beta=1, nu=gamma=0.5 with the worked example's diffusivities
    return Params(chi_s=0.3, chi_i=0.4, chi_r=0.5, b=2.0, beta=1.0, nu=0.5, gamma=0.5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
