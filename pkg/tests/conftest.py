import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from surveyloop.lsde import ResponseScorer
from surveyloop.policy import EvTable, load_default_priors

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def scorer() -> ResponseScorer:
    return ResponseScorer()


@pytest.fixture(scope="session")
def priors() -> EvTable:
    return load_default_priors()


@pytest.fixture()
def data_dir() -> Path:
    return DATA_DIR
