import pytest

from orbitlab.catalog import build_catalog
from orbitlab.scenario import scenario_from_elements
from orbitlab.trajectory import simulate
from orbitlab.units import AU_M, M_SUN


@pytest.fixture(scope="session")
def catalog():
    return build_catalog()


@pytest.fixture(scope="session")
def circular_equal(catalog):
    return catalog.scenario("circular-equal")


@pytest.fixture(scope="session")
def small_scenario():
    """Cheap two-orbit system for interpolation and budget tests."""
    return scenario_from_elements("test-small", M_SUN, 0.7 * M_SUN, AU_M, 0.4,
                                  n_orbits=2, samples_per_orbit=500)


@pytest.fixture(scope="session")
def small_trajectory(small_scenario):
    return simulate(small_scenario)
