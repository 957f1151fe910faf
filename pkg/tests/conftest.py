import sys
from pathlib import Path

import pytest

from semistatic.scenario import load_scenario

REPO = Path(__file__).resolve().parents[1]
SCENARIOS = REPO / "scenarios"

sys.path.insert(0, str(REPO / "scripts"))


def scenario_path(name: str) -> Path:
    return SCENARIOS / f"{name}.json"


@pytest.fixture(scope="session")
def trinomial():
    return load_scenario(scenario_path("trinomial"))


@pytest.fixture(scope="session")
def trinomial_calibrated():
    return load_scenario(scenario_path("trinomial_calibrated"))


@pytest.fixture(scope="session")
def binomial():
    return load_scenario(scenario_path("binomial"))


@pytest.fixture(scope="session")
def glued_two_vol():
    return load_scenario(scenario_path("glued_two_vol"))


@pytest.fixture(scope="session")
def jump_counterexample():
    return load_scenario(scenario_path("jump_counterexample"))


@pytest.fixture(scope="session")
def informed_arbitrage():
    return load_scenario(scenario_path("informed_arbitrage"))


@pytest.fixture(scope="session")
def initial_enlargement():
    return load_scenario(scenario_path("initial_enlargement"))
