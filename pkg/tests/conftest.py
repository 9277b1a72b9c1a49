import pytest

from logbec.dkc import KickSpec
from logbec.model import BECParams, spherical_state
from logbec.scenario import Scenario
from logbec.units import BOHR_RADIUS, ELECTRON_VOLT, UnitSystem
from logbec.variational import IntegratorSettings

B_BOUND_EV = 3.3e-15


@pytest.fixture(scope="session")
def units():
    return UnitSystem()


@pytest.fixture(scope="session")
def b_bound(units):
    return units.to_internal(B_BOUND_EV * ELECTRON_VOLT, "energy")


@pytest.fixture(scope="session")
def default_params(units, b_bound):
    """N = 5e4 Rb-87 atoms, a = 90 a0, b at the current bound."""
    return BECParams(5e4, units.to_internal(90 * BOHR_RADIUS, "length"), b_bound)


@pytest.fixture(scope="session")
def default_state(units):
    return spherical_state(units.to_internal(2.5e-6, "length"), 0.0)


@pytest.fixture(scope="session")
def seconds(units):
    return lambda s: units.to_internal(s, "time")


@pytest.fixture(scope="session")
def free_scenario(units, default_params, default_state, seconds):
    return Scenario(units, default_params, default_state, seconds(1.0),
                    settings=IntegratorSettings(sample_interval=seconds(0.01)))


@pytest.fixture(scope="session")
def dkc_scenario(free_scenario, seconds):
    from dataclasses import replace
    return replace(free_scenario, kick=KickSpec(seconds(0.01), seconds(1e-5)))
