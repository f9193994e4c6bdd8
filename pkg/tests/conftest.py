import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import population_doc, rainfall_doc, workforce_doc


@pytest.fixture
def rainfall():
    return rainfall_doc()


@pytest.fixture
def workforce():
    return workforce_doc()


@pytest.fixture
def population():
    return population_doc()
