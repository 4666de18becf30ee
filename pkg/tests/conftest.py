from fractions import Fraction

import pytest

from windtree.geometry import WindTreeParams, eigen_slope, find_periodic_section
from windtree.iet import PermutationPair
from windtree.rauzy import PeriodicIET, rauzy_loop_search
from windtree.transfer import stable_spectrum, transfer_data

VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def golden():
    loop = rauzy_loop_search(PermutationPair(("A", "B"), ("B", "A")), 2)[0]
    return PeriodicIET.from_loop(loop)


@pytest.fixture(scope="session")
def golden_td(golden):
    return transfer_data(golden, stable_spectrum(golden.A, golden.alphabet)[0])


@pytest.fixture(scope="session")
def wind_params():
    half = Fraction(1, 2)
    return WindTreeParams(half, half, eigen_slope([[1, 1], [1, 2]], half, half))


@pytest.fixture(scope="session")
def wind(wind_params):
    return find_periodic_section(wind_params)


@pytest.fixture(scope="session")
def wind_pair(wind):
    X = wind.periodic
    return stable_spectrum(X.A, X.alphabet, wind.section.involutions, "-+")[0]


@pytest.fixture(scope="session")
def wind_td(wind, wind_pair):
    return transfer_data(wind.periodic, wind_pair)


@pytest.fixture(scope="session")
def wind_invariant(wind):
    from windtree.invariant import windtree_invariant
    return windtree_invariant(wind)
