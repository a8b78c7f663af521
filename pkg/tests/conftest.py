import pytest

from twocenter.models import PhysicalConfig, QuantumNumbers, SolverSettings


@pytest.fixture
def solver_settings():
    return SolverSettings()


@pytest.fixture
def oscillator():
    """Z = 0, omega = 1, R = 2: separable oscillator with E = 2(N + 3/2) + 2"""
    return PhysicalConfig(Z=0.0, omega=1.0, R=2.0)


@pytest.fixture
def ground():
    return QuantumNumbers(n=0, q=0, m=0)


@pytest.fixture
def confined_ion():
    """Z = 1, omega = 0.25 reference family"""
    return PhysicalConfig(Z=1.0, omega=0.25, R=10.0)


@pytest.fixture(scope="session")
def oracle_records():
    """Committed grid fixtures; a missing file is generated once and kept for later runs"""
    from tools.generate_fixtures import FIXTURE_FILE, generate
    from twocenter.utils import helpers

    if FIXTURE_FILE.exists():
        return helpers.read_fixtures(FIXTURE_FILE)
    return generate(FIXTURE_FILE)
