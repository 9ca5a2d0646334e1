"""
Pytest configuration file for the genkahler test suite.
"""

import json
import random
from pathlib import Path

import pytest

from genkahler.core.coeffring import make_ring
from genkahler.core.tensorcalc import standard_kahler_form
from genkahler.data.corpus import Corpus

# Define path to fixture data
FIXTURE_PATH = Path(__file__).parent / "fixtures" / "expected_verdicts.json"


@pytest.fixture(scope="session")
def expected_verdicts():
    """Load the expected corpus outcomes into a python dict."""
    return json.loads(FIXTURE_PATH.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus():
    return Corpus()


@pytest.fixture(scope="session")
def R1():
    return make_ring(1)


@pytest.fixture(scope="session")
def R2():
    return make_ring(2)


@pytest.fixture(scope="session")
def R3():
    return make_ring(3)


@pytest.fixture(scope="session")
def omega2(R2):
    """Flat Kaehler form on C^2."""
    return standard_kahler_form(R2)


@pytest.fixture
def rng():
    """Fresh seeded generator per test."""
    return random.Random(1234)


@pytest.fixture
def scenario_file(tmp_path):
    """Write a scenario dict to a temporary JSON file and return its path."""
    def _write(data, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path
    return _write


# Define custom markers for categorizing tests
def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line("markers", "optional: mark test as optional (may be skipped)")
    config.addinivalue_line("markers", "integration: mark test as an integration test")
    config.addinivalue_line("markers", "slow: mark test as slow (may take longer to run)")


# Setup logging for tests
@pytest.fixture(scope="session", autouse=True)
def setup_logging():
    """Configure logging for tests."""
    import logging
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    yield
