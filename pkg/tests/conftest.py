import os

# Keep test runs from writing rotating log files
os.environ["FACON_LOG_DIR"] = ""

from pathlib import Path
from typing import Callable, Dict

import pytest

from facon_api.services.parser import PolynomialMapping, parse_mapping
from facon_api.services.strata import AsymptoticSetReport, asymptotic_set

MAPPINGS_DIR = Path(__file__).resolve().parent.parent / "mappings"

BUNDLED = ("exfacon", "cusp", "cone", "whitney", "plane", "triple", "identity")
DOMINANT_WITH_FACONS = ("exfacon", "cusp", "cone", "whitney", "plane", "triple")

# Desk-scale settings: every worked example resolves at E = 2
TEST_E = 2
TEST_D = 3
TEST_TRIALS = 4
TEST_SAMPLES = 60
TEST_SEED = 0


@pytest.fixture(scope="session")
def mappings_dir() -> Path:
    return MAPPINGS_DIR


@pytest.fixture(scope="session")
def load_mapping() -> Callable[[str], PolynomialMapping]:
    def load(name: str) -> PolynomialMapping:
        return parse_mapping((MAPPINGS_DIR / f"{name}.map").read_text(encoding="utf-8"))

    return load


@pytest.fixture(scope="session")
def analyzed(load_mapping: Callable[[str], PolynomialMapping]) -> Callable[[str], AsymptoticSetReport]:
    """Session cache of full analyses of the bundled mappings."""
    cache: Dict[str, AsymptoticSetReport] = {}

    def analyze(name: str) -> AsymptoticSetReport:
        if name not in cache:
            cache[name] = asymptotic_set(
                load_mapping(name), E=TEST_E, D=TEST_D, seed=TEST_SEED, trials=TEST_TRIALS, samples=TEST_SAMPLES
            )
        return cache[name]

    return analyze
