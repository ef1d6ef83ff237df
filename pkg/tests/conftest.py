import pytest
from hypothesis import settings

from compactferm.experiments import EvolutionSetup
from compactferm.lattice import build_lattice

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def lattice_a():
    return build_lattice("A")


@pytest.fixture(scope="session")
def lattice_b():
    return build_lattice("B")


@pytest.fixture(scope="session")
def setup_a():
    return EvolutionSetup("A")


@pytest.fixture(scope="session")
def setup_b():
    return EvolutionSetup("B")
