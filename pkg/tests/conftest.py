import pytest

from dnormlab.efunc import GridConfig, standard_probes
from dnormlab.generator import RatioGenerator, SpectralGenerator
from dnormlab.densities import get_density
from dnormlab.spectral import (
    change_of_variable_family,
    gaussian_family,
    uniform_wedge_family,
)
from dnormlab.process_sim import simulate_msp


@pytest.fixture(scope="session")
def grid200():
    return GridConfig(200)


@pytest.fixture(scope="session")
def probes200(grid200):
    return dict(standard_probes(grid200))


@pytest.fixture(scope="session")
def gaussian_fam():
    return gaussian_family(1.0)


@pytest.fixture(scope="session")
def wedge_fam():
    return uniform_wedge_family()


@pytest.fixture(scope="session")
def cov_cauchy_fam(gaussian_fam):
    return change_of_variable_family(gaussian_fam, "cauchy")


@pytest.fixture(scope="session")
def ratio_gen(gaussian_fam):
    # closed-form path: h equals the family's own slice shape
    return RatioGenerator(gaussian_fam, get_density("normal", 1.0))


@pytest.fixture(scope="session")
def wedge_gen(wedge_fam):
    return SpectralGenerator(wedge_fam)


@pytest.fixture(scope="session")
def cov_gen(cov_cauchy_fam):
    return SpectralGenerator(cov_cauchy_fam)


# heavyweight ensembles shared by the process tests and the acceptance gate

@pytest.fixture(scope="session")
def wedge_msp_100k(wedge_gen, grid200):
    return simulate_msp(wedge_gen, grid=grid200, n=100_000, seed=11)


@pytest.fixture(scope="session")
def cov_msp_100k(cov_gen, grid200):
    return simulate_msp(cov_gen, grid=grid200, n=100_000, seed=12)


# one summary line per acceptance criterion, printed after the test table

_acceptance_lines: list[tuple[int, str]] = []


def record_acceptance(number: int, line: str) -> None:
    _acceptance_lines.append((number, line))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance_lines):
        terminalreporter.write_line(line)
